//! Signatures of 2-cycles (edges) and triangles, their tallies, and the
//! exact primal constraints the tallies satisfy.
//!
//! Edge signature of `(a, b)`: `A` lists the degrees of `a`'s other
//! neighbours in ccw order starting right after `b`, and `B` likewise around
//! `b` starting right after `a`. The first entries are the apexes of the two
//! faces on either side of the edge.
//!
//! Triangle signature of a facial triangle `(a, b, c)` in ccw face order
//! (`c` follows `b` around `a`): `A` lists `a`'s neighbours from the one after
//! `c` up to the one before `b`, and cyclically for `B` and `C`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Adjacency, RotationGraph};
use crate::util::ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("vertex {vertex} has degree {degree} < 3")]
    DegreeTooSmall { vertex: usize, degree: usize },
    #[error("{0:?} is not a facial triangle")]
    NotFacial([usize; 3]),
    #[error("sequence lengths do not match the degrees: {0}")]
    Shape(String),
    #[error("graph does not fit the {variant} variant: {reason}")]
    VariantMismatch { variant: Variant, reason: String },
}

/// The three problem settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Triangulations.
    #[serde(rename = "general")]
    General,
    /// 3-connected planar graphs without triangles.
    #[serde(rename = "r4")]
    NoTriangles,
    /// 3-connected planar graphs without triangles and quadrilaterals.
    #[serde(rename = "r5")]
    NoSmallFaces,
}

impl Variant {
    /// Upper bound on `m / n`.
    pub fn m_ratio(self) -> BigRational {
        match self {
            Variant::General => ratio(3, 1),
            Variant::NoTriangles => ratio(2, 1),
            Variant::NoSmallFaces => ratio(5, 3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::General => "general",
            Variant::NoTriangles => "r4",
            Variant::NoSmallFaces => "r5",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "general" => Some(Variant::General),
            "r4" => Some(Variant::NoTriangles),
            "r5" => Some(Variant::NoSmallFaces),
            _ => None,
        }
    }

    pub fn check(self, tally: &SignatureTally) -> Result<(), SignatureError> {
        let reason = match self {
            Variant::General if !tally.is_triangulation => Some("not a triangulation".to_string()),
            Variant::NoTriangles if tally.min_face < 4 => Some(format!("has a face of size {}", tally.min_face)),
            Variant::NoSmallFaces if tally.min_face < 5 => Some(format!("has a face of size {}", tally.min_face)),
            _ => None,
        };
        match reason {
            Some(reason) => Err(SignatureError::VariantMismatch { variant: self, reason }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, xs: &[u32]) -> fmt::Result {
    f.write_str("(")?;
    for (k, x) in xs.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str(")")
}

/// `(i, j, A, B)` with `|A| = i - 1`, `|B| = j - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature2 {
    pub i: u32,
    pub j: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

impl Signature2 {
    pub fn new(i: u32, j: u32, a: Vec<u32>, b: Vec<u32>) -> Result<Self, SignatureError> {
        if a.len() + 1 != i as usize || b.len() + 1 != j as usize || i < 2 || j < 2 {
            return Err(SignatureError::Shape(format!("i={i}, j={j}, |A|={}, |B|={}", a.len(), b.len())));
        }
        Ok(Self { i, j, a, b })
    }

    /// The same edge read from the other endpoint.
    pub fn swapped(&self) -> Self {
        Self {
            i: self.j,
            j: self.i,
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// The signature in the mirror embedding.
    pub fn reflected(&self) -> Self {
        Self {
            i: self.i,
            j: self.j,
            a: self.a.iter().rev().copied().collect(),
            b: self.b.iter().rev().copied().collect(),
        }
    }

    /// Orientation with the smaller `(degree, sequence)` first.
    pub fn canonical(&self) -> Self {
        let s = self.swapped();
        if s < *self {
            s
        } else {
            self.clone()
        }
    }
}

impl fmt::Display for Signature2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},", self.i, self.j)?;
        write_seq(f, &self.a)?;
        f.write_str(",")?;
        write_seq(f, &self.b)?;
        f.write_str(")")
    }
}

/// `(i, j, k, A, B, C)` with `|A| = i - 2` and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature3 {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub c: Vec<u32>,
}

impl Signature3 {
    pub fn new(i: u32, j: u32, k: u32, a: Vec<u32>, b: Vec<u32>, c: Vec<u32>) -> Result<Self, SignatureError> {
        let ok = |d: u32, x: &[u32]| d >= 3 && x.len() + 2 == d as usize;
        if !(ok(i, &a) && ok(j, &b) && ok(k, &c)) {
            return Err(SignatureError::Shape(format!(
                "({i},{j},{k}) with lengths ({},{},{})",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { i, j, k, a, b, c })
    }

    /// Cyclic relabelling `(a, b, c) -> (b, c, a)`.
    pub fn rotated(&self) -> Self {
        Self {
            i: self.j,
            j: self.k,
            k: self.i,
            a: self.b.clone(),
            b: self.c.clone(),
            c: self.a.clone(),
        }
    }

    /// The signature in the mirror embedding: face order `(a, c, b)`.
    pub fn reflected(&self) -> Self {
        let rev = |x: &[u32]| x.iter().rev().copied().collect();
        Self {
            i: self.i,
            j: self.k,
            k: self.j,
            a: rev(&self.a),
            b: rev(&self.c),
            c: rev(&self.b),
        }
    }

    /// Least of the three cyclic relabellings.
    pub fn canonical(&self) -> Self {
        let r1 = self.rotated();
        let r2 = r1.rotated();
        [self.clone(), r1, r2].into_iter().min().expect("three candidates")
    }
}

impl fmt::Display for Signature3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},", self.i, self.j, self.k)?;
        write_seq(f, &self.a)?;
        f.write_str(",")?;
        write_seq(f, &self.b)?;
        f.write_str(",")?;
        write_seq(f, &self.c)?;
        f.write_str(")")
    }
}

fn min_degree(g: &RotationGraph, vs: &[usize]) -> Result<(), SignatureError> {
    for &v in vs {
        if g.degree(v) < 3 {
            return Err(SignatureError::DegreeTooSmall {
                vertex: v,
                degree: g.degree(v),
            });
        }
    }
    Ok(())
}

/// Signature of the edge `(a, b)`, read from `a`.
pub fn edge_signature(g: &RotationGraph, a: usize, b: usize) -> Result<Signature2, SignatureError> {
    if a >= g.n() || b >= g.n() || g.position(a, b).is_none() {
        return Err(SignatureError::NotAdjacent(a, b));
    }
    min_degree(g, &[a, b])?;
    let deg = |v: usize| g.degree(v) as u32;
    let side = |x: usize, y: usize| -> Vec<u32> { g.rotation_from(x, y).skip(1).map(deg).collect() };
    Signature2::new(deg(a), deg(b), side(a, b), side(b, a))
}

/// Signature of a facial triangle given by its vertex set.
pub fn triangle_signature(g: &RotationGraph, tri: [usize; 3]) -> Result<Signature3, SignatureError> {
    let [a, mut b, mut c] = tri;
    for (x, y) in [(a, b), (b, c), (c, a)] {
        if x >= g.n() || y >= g.n() || g.position(x, y).is_none() {
            return Err(SignatureError::NotAdjacent(x, y));
        }
    }
    min_degree(g, &tri)?;
    if g.succ(a, b) != c {
        std::mem::swap(&mut b, &mut c);
    }
    if g.succ(a, b) != c || g.succ(b, c) != a || g.succ(c, a) != b {
        return Err(SignatureError::NotFacial(tri));
    }
    let deg = |v: usize| g.degree(v) as u32;
    // Neighbours of x strictly between `from` and `to`, ccw.
    let side = |x: usize, from: usize| -> Vec<u32> {
        let d = g.degree(x);
        g.rotation_from(x, from).skip(1).take(d - 2).map(deg).collect()
    };
    Signature3::new(deg(a), deg(b), deg(c), side(a, c), side(b, a), side(c, b))
}

/// Signature counts of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureTally {
    pub n: usize,
    pub m: usize,
    pub is_triangulation: bool,
    pub min_face: usize,
    pub degrees: Vec<u32>,
    #[serde(serialize_with = "string_keys")]
    pub counts2: BTreeMap<Signature2, u64>,
    #[serde(serialize_with = "string_keys")]
    pub counts3: BTreeMap<Signature3, u64>,
}

fn string_keys<K: fmt::Display, S: Serializer>(map: &BTreeMap<K, u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(map.iter().map(|(k, v)| (k.to_string(), v)))
}

impl SignatureTally {
    pub fn edge_total(&self) -> u64 {
        self.counts2.values().sum()
    }

    pub fn triangle_total(&self) -> u64 {
        self.counts3.values().sum()
    }
}

/// One canonical signature per edge and per facial triangle.
pub fn tally(g: &RotationGraph) -> Result<SignatureTally, SignatureError> {
    let mut counts2 = BTreeMap::new();
    for (u, v) in g.edges() {
        *counts2.entry(edge_signature(g, u, v)?.canonical()).or_insert(0) += 1;
    }
    let faces = g.trace_faces();
    let mut counts3 = BTreeMap::new();
    for f in &faces.faces {
        if f.len() == 3 {
            let sig = triangle_signature(g, [f[0], f[1], f[2]])?;
            *counts3.entry(sig.canonical()).or_insert(0) += 1;
        }
    }
    Ok(SignatureTally {
        n: g.n(),
        m: g.m(),
        is_triangulation: !faces.is_empty() && faces.sizes.iter().all(|&s| s == 3),
        min_face: faces.sizes.iter().copied().min().unwrap_or(0),
        degrees: g.degree_sequence().into_iter().map(|d| d as u32).collect(),
        counts2,
        counts3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = "<=")]
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub relation: Relation,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl ConstraintCheck {
    fn new(name: impl Into<String>, relation: Relation, lhs: BigRational, rhs: BigRational) -> Self {
        let holds = match relation {
            Relation::Equal => lhs == rhs,
            Relation::AtMost => lhs <= rhs,
        };
        Self {
            name: name.into(),
            relation,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimalReport {
    pub variant: Variant,
    pub constraints: Vec<ConstraintCheck>,
    pub all_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("primal constraints violated: {}", .failed.join(", "))]
pub struct PrimalViolation {
    pub failed: Vec<String>,
    pub report: PrimalReport,
}

fn recip(x: u32) -> BigRational {
    ratio(1, x as i64)
}

fn chi(x: &[u32], d: u32) -> i64 {
    x.iter().filter(|&&v| v == d).count() as i64
}

/// Exact evaluation of the charging constraints on a tally.
pub fn check_primal_constraints(t: &SignatureTally, variant: Variant) -> Result<PrimalReport, PrimalViolation> {
    let n = BigRational::from_integer(BigInt::from(t.n));
    let m = BigRational::from_integer(BigInt::from(t.m));
    let count = |c: u64| BigRational::from_integer(BigInt::from(c));
    let mut checks = Vec::new();

    let (mut a2, mut b2, mut c2) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (s, &f) in &t.counts2 {
        let f = count(f);
        a2 += &f * (recip(s.i) + recip(s.j));
        let side = |d: u32, xs: &[u32]| -> BigRational {
            xs.iter().map(|&x| ratio(1, (x * (d - 1)) as i64)).sum()
        };
        b2 += &f * (side(s.i, &s.a) + side(s.j, &s.b));
        c2 += f;
    }
    checks.push(ConstraintCheck::new("A2", Relation::Equal, a2, n.clone()));
    checks.push(ConstraintCheck::new("B2", Relation::Equal, b2, n.clone()));
    checks.push(ConstraintCheck::new("C2", Relation::Equal, c2, m.clone()));
    checks.push(ConstraintCheck::new("C2 m/n", Relation::AtMost, m, variant.m_ratio() * &n));

    if variant == Variant::General {
        let (mut a3, mut b3, mut c3) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
        for (s, &f) in &t.counts3 {
            let f = count(f);
            a3 += &f * (recip(s.i) + recip(s.j) + recip(s.k));
            let side = |d: u32, xs: &[u32]| -> BigRational {
                xs.iter().map(|&x| ratio(1, (x * (d - 2)) as i64)).sum()
            };
            b3 += &f * (side(s.i, &s.a) + side(s.j, &s.b) + side(s.k, &s.c));
            c3 += f;
        }
        checks.push(ConstraintCheck::new("A3", Relation::Equal, a3, n.clone()));
        checks.push(ConstraintCheck::new("B3", Relation::Equal, b3, n.clone()));
        checks.push(ConstraintCheck::new("C3", Relation::AtMost, c3, ratio(2, 1) * &n));
    }

    // E_ij: each edge of degree type {i, j} lies in i + j - 2 other 2-extensions.
    let mut pairs: Vec<(u32, u32)> = t.counts2.keys().map(|s| (s.i.min(s.j), s.i.max(s.j))).collect();
    pairs.dedup();
    pairs.sort_unstable();
    pairs.dedup();
    for (i, j) in pairs {
        let mut lhs = 0i64;
        let mut rhs = 0i64;
        for (s, &f) in &t.counts2 {
            let f = f as i64;
            if (s.i.min(s.j), s.i.max(s.j)) == (i, j) {
                lhs += (i + j - 2) as i64 * f;
            }
            for (d, xs) in [(s.i, &s.a), (s.j, &s.b)] {
                if d == i {
                    rhs += f * chi(xs, j);
                }
                if d == j && i != j {
                    rhs += f * chi(xs, i);
                }
            }
        }
        checks.push(ConstraintCheck::new(
            format!("E{i},{j}"),
            Relation::Equal,
            BigRational::from_integer(lhs.into()),
            BigRational::from_integer(rhs.into()),
        ));
    }

    let failed: Vec<String> = checks.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    let report = PrimalReport {
        variant,
        all_hold: failed.is_empty(),
        constraints: checks,
    };
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(PrimalViolation { failed, report })
    }
}

/// Coefficient of a canonical (`i <= j`) edge signature in the `E33`
/// constraint, written as `lhs - rhs`.
pub fn e33_coefficient(s: &Signature2) -> i64 {
    let s = if s.i <= s.j { s.clone() } else { s.swapped() };
    match (s.i, s.j) {
        (3, 3) => 4 - chi(&s.a, 3) - chi(&s.b, 3),
        (3, _) => -chi(&s.a, 3),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{platonic, Solid};

    #[test]
    fn regular_solids_have_one_signature_class() {
        let ico = tally(&platonic(Solid::Icosahedron)).unwrap();
        let sig = Signature2::new(5, 5, vec![5; 4], vec![5; 4]).unwrap();
        assert_eq!(ico.counts2, BTreeMap::from([(sig, 30)]));
        let tri = Signature3::new(5, 5, 5, vec![5; 3], vec![5; 3], vec![5; 3]).unwrap();
        assert_eq!(ico.counts3, BTreeMap::from([(tri, 20)]));

        let oct = tally(&platonic(Solid::Octahedron)).unwrap();
        assert_eq!((oct.counts2.len(), oct.edge_total()), (1, 12));
        assert_eq!((oct.counts3.len(), oct.triangle_total()), (1, 8));

        let k4 = platonic(Solid::Tetrahedron);
        assert_eq!(edge_signature(&k4, 0, 1).unwrap().to_string(), "(3,3,(3,3),(3,3))");
        assert_eq!(triangle_signature(&k4, [0, 1, 2]).unwrap().to_string(), "(3,3,3,(3),(3),(3))");
        let cube = platonic(Solid::Cube);
        assert_eq!(edge_signature(&cube, 0, 1).unwrap().to_string(), "(3,3,(3,3),(3,3))");
    }

    #[test]
    fn flanking_apexes_are_face_apexes() {
        let g = crate::families::stacked_triangulation(12, 3).unwrap();
        for (u, v) in g.edges() {
            let s = edge_signature(&g, u, v).unwrap();
            assert_eq!(s.a[0] as usize, g.degree(g.succ(u, v)));
            assert_eq!(s.b[0] as usize, g.degree(g.succ(v, u)));
            // In a triangulation the last entry of A is the other apex.
            assert_eq!(s.a[s.a.len() - 1], s.b[0]);
        }
    }

    #[test]
    fn errors() {
        let g = RotationGraph::parse("3 2\n0: 1\n1: 0 2\n2: 1\n").unwrap();
        assert!(matches!(edge_signature(&g, 0, 1), Err(SignatureError::DegreeTooSmall { .. })));
        let k4 = platonic(Solid::Tetrahedron);
        assert!(matches!(edge_signature(&k4, 0, 0), Err(SignatureError::NotAdjacent(..))));
        let cube = platonic(Solid::Cube);
        let (a, b) = cube.edges()[0];
        let c = cube.rotation(b).iter().copied().find(|&x| x != a).unwrap();
        assert!(triangle_signature(&cube, [a, b, c]).is_err());
    }

    #[test]
    fn primal_constraints_on_icosahedron() {
        let t = tally(&platonic(Solid::Icosahedron)).unwrap();
        let rep = check_primal_constraints(&t, Variant::General).unwrap();
        assert!(rep.all_hold);
        let c3 = rep.constraints.iter().find(|c| c.name == "C3").unwrap();
        assert_eq!(c3.lhs, "20");
    }

    #[test]
    fn dodecahedron_meets_the_edge_ratio_with_equality() {
        let t = tally(&platonic(Solid::Dodecahedron)).unwrap();
        let rep = check_primal_constraints(&t, Variant::NoSmallFaces).unwrap();
        let ratio = rep.constraints.iter().find(|c| c.name == "C2 m/n").unwrap();
        assert_eq!((ratio.lhs.as_str(), ratio.rhs.as_str()), ("30", "100/3"));
    }

    #[test]
    fn violated_constraints_are_named() {
        let mut t = tally(&platonic(Solid::Octahedron)).unwrap();
        t.n += 1;
        let err = check_primal_constraints(&t, Variant::General).unwrap_err();
        assert!(err.failed.contains(&"A2".to_string()));
        assert!(err.failed.contains(&"A3".to_string()));
    }

    #[test]
    fn e33_coefficients() {
        let s = Signature2::new(3, 3, vec![3, 4], vec![5, 3]).unwrap();
        assert_eq!(e33_coefficient(&s), 2);
        let s = Signature2::new(4, 3, vec![3, 3, 3], vec![3, 5]).unwrap();
        assert_eq!(e33_coefficient(&s), -1);
        let s = Signature2::new(4, 4, vec![3; 3], vec![3; 3]).unwrap();
        assert_eq!(e33_coefficient(&s), 0);
    }
}
