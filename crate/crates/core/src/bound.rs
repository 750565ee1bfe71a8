//! Probability products and the charging bound on `log t(G)`.
//!
//! For a degree `r` and a neighbour-degree sequence `X`:
//!
//! * `P2(r, X) = prod_x (1 - 1/(r x))`
//! * `P3(r, X) = prod over consecutive pairs (1 - 2/(r x_p x_{p+1}))`
//!
//! These combine into `P_ij`, `P̂_ij` and `P_ijk`, upper bounds on the
//! probability that a 2-cycle or triangle does not occur given that its
//! dependent cycles do not. Summing `log P` over a tally and adding the
//! redistributed degree charge `D1 + .. + D4 = sum_v log d_v` bounds
//! `log t(G)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::RotationGraph;
use crate::kirchhoff::count_spanning_trees;
use crate::signatures::{tally, Signature2, Signature3, SignatureError, SignatureTally};
use crate::util::{ln_big, ratio};

pub use crate::signatures::Variant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("entries must be positive, got {0}")]
    NonPositiveEntry(u32),
    #[error("factor out of (0, 1]: {0}")]
    Domain(String),
    #[error("invalid mu for {variant}: {reason}")]
    Mu { variant: Variant, reason: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// Charge weights `(mu1, mu2, mu3, mu4)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MuVector(pub [f64; 4]);

impl MuVector {
    /// Weights used for the general problem.
    pub const GENERAL: MuVector = MuVector([0.3, 0.25, 0.225, 0.225]);
    /// Weights used without triangles.
    pub const NO_TRIANGLES: MuVector = MuVector([0.9, 0.1, 0.0, 0.0]);
    /// Weights used without triangles and quadrilaterals.
    pub const NO_SMALL_FACES: MuVector = MuVector([0.615, 0.385, 0.0, 0.0]);

    pub fn default_for(variant: Variant) -> Self {
        match variant {
            Variant::General => Self::GENERAL,
            Variant::NoTriangles => Self::NO_TRIANGLES,
            Variant::NoSmallFaces => Self::NO_SMALL_FACES,
        }
    }

    pub fn validate(&self, variant: Variant) -> Result<(), BoundError> {
        let [m1, m2, m3, m4] = self.0;
        let err = |reason: String| Err(BoundError::Mu { variant, reason });
        if self.0.iter().any(|x| !x.is_finite()) {
            return err("non-finite weight".into());
        }
        match variant {
            Variant::General if ((m1 + m2 + m3 + m4) - 1.0).abs() > 1e-12 => {
                err(format!("weights sum to {}", m1 + m2 + m3 + m4))
            }
            Variant::NoTriangles | Variant::NoSmallFaces if m3 != 0.0 || m4 != 0.0 => {
                err("mu3 and mu4 must be zero".into())
            }
            Variant::NoTriangles | Variant::NoSmallFaces if ((m1 + m2) - 1.0).abs() > 1e-12 => {
                err(format!("mu1 + mu2 = {}", m1 + m2))
            }
            _ => Ok(()),
        }
    }
}

fn check_entries(xs: &[u32]) -> Result<(), BoundError> {
    match xs.iter().find(|&&x| x == 0) {
        Some(&x) => Err(BoundError::NonPositiveEntry(x)),
        None => Ok(()),
    }
}

fn positive(value: f64, what: impl FnOnce() -> String) -> Result<f64, BoundError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(BoundError::Domain(what()))
    }
}

/// `ln P2(r, X)`.
pub fn ln_p2(r: u32, xs: &[u32]) -> Result<f64, BoundError> {
    check_entries(xs)?;
    xs.iter()
        .map(|&x| {
            let f = positive(1.0 - 1.0 / (r as f64 * x as f64), || format!("1 - 1/({r}*{x})"))?;
            Ok(f.ln())
        })
        .sum()
}

/// `ln P3(r, X)`.
pub fn ln_p3(r: u32, xs: &[u32]) -> Result<f64, BoundError> {
    check_entries(xs)?;
    xs.windows(2)
        .map(|w| {
            let f = positive(1.0 - 2.0 / (r as f64 * w[0] as f64 * w[1] as f64), || {
                format!("1 - 2/({r}*{}*{})", w[0], w[1])
            })?;
            Ok(f.ln())
        })
        .sum()
}

pub fn p2(r: u32, xs: &[u32]) -> Result<f64, BoundError> {
    ln_p2(r, xs).map(f64::exp)
}

pub fn p3(r: u32, xs: &[u32]) -> Result<f64, BoundError> {
    ln_p3(r, xs).map(f64::exp)
}

pub fn p2_exact(r: u32, xs: &[u32]) -> Result<BigRational, BoundError> {
    check_entries(xs)?;
    Ok(xs
        .iter()
        .map(|&x| BigRational::one() - ratio(1, r as i64 * x as i64))
        .product())
}

pub fn p3_exact(r: u32, xs: &[u32]) -> Result<BigRational, BoundError> {
    check_entries(xs)?;
    Ok(xs
        .windows(2)
        .map(|w| BigRational::one() - ratio(2, r as i64 * w[0] as i64 * w[1] as i64))
        .product())
}

/// `ln (1 - c/(prod)) ` for the apex factors.
fn ln_apex(c: f64, prod: f64) -> Result<f64, BoundError> {
    Ok(positive(1.0 - c / prod, || format!("1 - {c}/{prod}"))?.ln())
}

fn first(xs: &[u32]) -> Result<u32, BoundError> {
    xs.first()
        .copied()
        .ok_or_else(|| BoundError::Domain("empty neighbour sequence".into()))
}

/// `ln` of the quantity `Q` in `P_ij = 1 - 1/(ij Q)`.
pub fn ln_q_ij(s: &Signature2) -> Result<f64, BoundError> {
    let (i, j) = (s.i as f64, s.j as f64);
    let (a1, b1) = (first(&s.a)? as f64, first(&s.b)? as f64);
    Ok(ln_p3(s.i, &s.a)?
        + ln_p3(s.j, &s.b)?
        + ln_apex(2.0, i * j * a1)?
        + ln_apex(2.0, i * j * b1)?
        + 0.5 * (ln_p2(s.i, &s.a)? + ln_p2(s.j, &s.b)?))
}

pub fn p_ij(s: &Signature2) -> Result<f64, BoundError> {
    let q = ln_q_ij(s)?.exp();
    positive(1.0 - 1.0 / (s.i as f64 * s.j as f64 * q), || format!("P_ij at {s}"))
}

pub fn p_hat_ij(s: &Signature2) -> Result<f64, BoundError> {
    let q = (0.5 * (ln_p2(s.i, &s.a)? + ln_p2(s.j, &s.b)?)).exp();
    positive(1.0 - 1.0 / (s.i as f64 * s.j as f64 * q), || format!("P̂_ij at {s}"))
}

/// `ln` of the quantity `Q` in `P_ijk = 1 - 2/(ijk Q)`.
pub fn ln_q_ijk(s: &Signature3) -> Result<f64, BoundError> {
    let (i, j, k) = (s.i as f64, s.j as f64, s.k as f64);
    let (a1, b1, c1) = (first(&s.a)? as f64, first(&s.b)? as f64, first(&s.c)? as f64);
    Ok(0.5
        * (ln_p3(s.i, &s.a)?
            + ln_p3(s.j, &s.b)?
            + ln_p3(s.k, &s.c)?
            + ln_apex(2.0, i * k * a1)?
            + ln_apex(2.0, i * j * b1)?
            + ln_apex(2.0, j * k * c1)?))
}

pub fn p_ijk(s: &Signature3) -> Result<f64, BoundError> {
    let q = ln_q_ijk(s)?.exp();
    positive(1.0 - 2.0 / (s.i as f64 * s.j as f64 * s.k as f64 * q), || format!("P_ijk at {s}"))
}

fn lnx_over_x(x: u32) -> f64 {
    (x as f64).ln() / x as f64
}

/// The four charge sums.
///
/// `D1`, `D2` redistribute `mu1 log d_v`, `mu2 log d_v` over edges; `D3`,
/// `D4` redistribute `mu3 log d_v`, `mu4 log d_v` over facial triangles (the
/// identities are exact for triangulations).
pub fn charge_d(t: &SignatureTally, mu: &MuVector) -> [f64; 4] {
    let [m1, m2, m3, m4] = mu.0;
    let mut d = [0.0; 4];
    let side = |deg: u32, xs: &[u32], denom: u32| -> f64 {
        xs.iter().map(|&x| lnx_over_x(x) / denom as f64).sum::<f64>() * if deg > 0 { 1.0 } else { 0.0 }
    };
    for (s, &f) in &t.counts2 {
        let f = f as f64;
        d[0] += f * (lnx_over_x(s.i) + lnx_over_x(s.j));
        d[1] += f * (side(s.i, &s.a, s.i - 1) + side(s.j, &s.b, s.j - 1));
    }
    for (s, &f) in &t.counts3 {
        let f = f as f64;
        d[2] += f * (lnx_over_x(s.i) + lnx_over_x(s.j) + lnx_over_x(s.k));
        d[3] += f * (side(s.i, &s.a, s.i - 2) + side(s.j, &s.b, s.j - 2) + side(s.k, &s.c, s.k - 2));
    }
    [m1 * d[0], m2 * d[1], m3 * d[2], m4 * d[3]]
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundComponents {
    pub d: [f64; 4],
    /// `D1 + D2 + sum f log P_ij` (general) or with `P̂_ij` (restricted).
    pub two_cycle_part: f64,
    /// `D3 + D4 + sum f log P_ijk` (general only).
    pub triangle_part: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub variant: Variant,
    pub mu: MuVector,
    pub n: usize,
    pub m: usize,
    pub logbound: f64,
    pub components: BoundComponents,
    /// `log t(G)` when the graph was counted.
    pub exact_logt: Option<f64>,
    pub exact_t: Option<String>,
    /// `logbound - exact_logt`.
    pub slack: Option<f64>,
}

pub fn signature_bound(t: &SignatureTally, mu: &MuVector, variant: Variant) -> Result<BoundReport, BoundError> {
    mu.validate(variant)?;
    variant.check(t)?;
    let d = charge_d(t, mu);
    let (two, tri) = match variant {
        Variant::General => {
            let mut two = d[0] + d[1];
            for (s, &f) in &t.counts2 {
                two += f as f64 * p_ij(s)?.ln();
            }
            let mut tri = d[2] + d[3];
            for (s, &f) in &t.counts3 {
                tri += f as f64 * p_ijk(s)?.ln();
            }
            (two, Some(tri))
        }
        Variant::NoTriangles | Variant::NoSmallFaces => {
            let mut two = d[0] + d[1];
            for (s, &f) in &t.counts2 {
                two += f as f64 * p_hat_ij(s)?.ln();
            }
            (two, None)
        }
    };
    Ok(BoundReport {
        variant,
        mu: *mu,
        n: t.n,
        m: t.m,
        logbound: two + tri.unwrap_or(0.0),
        components: BoundComponents {
            d,
            two_cycle_part: two,
            triangle_part: tri,
        },
        exact_logt: None,
        exact_t: None,
        slack: None,
    })
}

/// Largest graph for which [`bound_for_graph`] also counts spanning trees.
pub const EXACT_COUNT_LIMIT: usize = 2000;

/// Tallies `g`, evaluates the bound and, for graphs up to
/// [`EXACT_COUNT_LIMIT`] vertices, compares with the exact count.
pub fn bound_for_graph(g: &RotationGraph, mu: &MuVector, variant: Variant) -> Result<BoundReport, BoundError> {
    let t = tally(g)?;
    let mut report = signature_bound(&t, mu, variant)?;
    if g.n() <= EXACT_COUNT_LIMIT {
        if let Ok(count) = count_spanning_trees(g) {
            let lt = ln_big(&count);
            report.exact_logt = Some(lt);
            report.exact_t = Some(count.to_string());
            report.slack = Some(report.logbound - lt);
        }
    }
    Ok(report)
}

/// Exact `P̂_ij` is irrational; its square is rational. Used in tests.
pub fn p_hat_ij_parts(s: &Signature2) -> Result<(BigRational, BigRational), BoundError> {
    let ij = BigRational::from_integer(BigInt::from(s.i as i64 * s.j as i64));
    Ok((ij, p2_exact(s.i, &s.a)? * p2_exact(s.j, &s.b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{platonic, Solid};

    #[test]
    fn p2_p3_exact_values() {
        assert_eq!(p2_exact(3, &[6, 6]).unwrap(), ratio(289, 324));
        assert!((p2(3, &[6, 6]).unwrap() - 289.0 / 324.0).abs() < 1e-15);
        assert_eq!(p3_exact(5, &[5, 5, 5]).unwrap(), ratio(123 * 123, 125 * 125));
        assert_eq!(p3(3, &[7]).unwrap(), 1.0);
        assert!(matches!(p2(3, &[0]), Err(BoundError::NonPositiveEntry(0))));
    }

    #[test]
    fn p_hat_of_k4_edge() {
        let s = Signature2::new(3, 3, vec![3, 3], vec![3, 3]).unwrap();
        // P2(3,(3,3)) = 64/81, so 1 - 1/(9 * 64/81) = 55/64.
        assert!((p_hat_ij(&s).unwrap() - 55.0 / 64.0).abs() < 1e-15);
        let (ij, sq) = p_hat_ij_parts(&s).unwrap();
        assert_eq!(ij, ratio(9, 1));
        assert_eq!(sq, ratio(64 * 64, 81 * 81));
    }

    #[test]
    fn probabilities_in_unit_interval() {
        let s = Signature2::new(5, 5, vec![5; 4], vec![5; 4]).unwrap();
        let p = p_ij(&s).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(p, p_ij(&s.reflected()).unwrap());
        let k4 = Signature3::new(3, 3, 3, vec![3], vec![3], vec![3]).unwrap();
        let q = p_ijk(&k4).unwrap();
        assert!(q > 0.0 && q < 1.0);
    }

    #[test]
    fn charge_identities() {
        let g = platonic(Solid::Icosahedron);
        let t = tally(&g).unwrap();
        let d = charge_d(&t, &MuVector::GENERAL);
        let total = 12.0 * 5f64.ln();
        assert!((d[0] - 0.3 * total).abs() < 1e-12);
        assert!((d[1] - 0.25 * total).abs() < 1e-12);
        assert!((d[2] - 0.225 * total).abs() < 1e-12);
        assert!((d[3] - 0.225 * total).abs() < 1e-12);
        assert_eq!(charge_d(&t, &MuVector([0.0; 4])), [0.0; 4]);
    }

    #[test]
    fn mu_validation() {
        assert!(MuVector::GENERAL.validate(Variant::General).is_ok());
        assert!(MuVector::NO_TRIANGLES.validate(Variant::NoTriangles).is_ok());
        assert!(MuVector([0.5, 0.5, 0.1, 0.0]).validate(Variant::NoTriangles).is_err());
        assert!(MuVector([0.5, 0.4, 0.0, 0.0]).validate(Variant::General).is_err());
    }

    #[test]
    fn variant_mismatch_is_refused() {
        let cube = platonic(Solid::Cube);
        assert!(matches!(
            bound_for_graph(&cube, &MuVector::GENERAL, Variant::General),
            Err(BoundError::Signature(SignatureError::VariantMismatch { .. }))
        ));
        let oct = platonic(Solid::Octahedron);
        assert!(bound_for_graph(&oct, &MuVector::NO_TRIANGLES, Variant::NoTriangles).is_err());
    }

    #[test]
    fn bounds_dominate_exact_counts_on_solids() {
        for (solid, variant) in [
            (Solid::Icosahedron, Variant::General),
            (Solid::Octahedron, Variant::General),
            (Solid::Tetrahedron, Variant::General),
            (Solid::Cube, Variant::NoTriangles),
            (Solid::Dodecahedron, Variant::NoSmallFaces),
        ] {
            let r = bound_for_graph(&platonic(solid), &MuVector::default_for(variant), variant).unwrap();
            assert!(r.slack.unwrap() >= -1e-9, "{}: {:?}", solid.name(), r);
        }
    }
}
