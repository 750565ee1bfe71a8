//! Case spaces for certificate verification.
//!
//! The brute-force tables ship as plain text under `data/`. A case group
//! fixes the vertex degrees in one orientation and bounds the entries of
//! each neighbour sequence; the first entry of an edge side (the apex of the
//! flanking triangle) has its own bound.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use super::{DualCertificate, DualError, DualProgram};

const GEN2_PAIRS: &str = include_str!("../../data/gen2_pairs.txt");
const GEN3_TRIPLETS: &str = include_str!("../../data/gen3_triplets.txt");
const R4_PAIRS: &str = include_str!("../../data/r4_pairs.txt");
const R5_PAIRS: &str = include_str!("../../data/r5_pairs.txt");

/// Smallest degree in a 3-connected planar graph, hence the smallest entry.
pub const MIN_ENTRY: u32 = 3;

/// Entry bound for every triplet of the triangle table.
pub const GEN3_ENTRY_MAX: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Edge,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseGroup {
    pub kind: GroupKind,
    /// `[i, j]` or `[i, j, k]` in orientation order.
    pub degrees: Vec<u32>,
    /// Upper bound for the first entry of each side.
    pub apex_max: Vec<u32>,
    /// Upper bound for the remaining entries of each side.
    pub entry_max: Vec<u32>,
    pub entry_min: u32,
}

impl CaseGroup {
    pub fn edge(i: u32, j: u32, apex: u32, a_max: u32, b_max: u32) -> Self {
        Self {
            kind: GroupKind::Edge,
            degrees: vec![i, j],
            apex_max: vec![apex, apex],
            entry_max: vec![a_max, b_max],
            entry_min: MIN_ENTRY,
        }
    }

    pub fn triangle(i: u32, j: u32, k: u32, max: u32) -> Self {
        Self {
            kind: GroupKind::Triangle,
            degrees: vec![i, j, k],
            apex_max: vec![max; 3],
            entry_max: vec![max; 3],
            entry_min: MIN_ENTRY,
        }
    }

    pub fn label(&self) -> String {
        let d: Vec<String> = self.degrees.iter().map(u32::to_string).collect();
        format!("({})", d.join(","))
    }

    pub fn sides(&self) -> usize {
        self.degrees.len()
    }

    pub fn side_len(&self, side: usize) -> usize {
        let d = self.degrees[side] as usize;
        match self.kind {
            GroupKind::Edge => d - 1,
            GroupKind::Triangle => d - 2,
        }
    }

    /// Degree multiplying the apex entry of `side` (besides its own).
    pub fn partner(&self, side: usize) -> u32 {
        match self.kind {
            GroupKind::Edge => self.degrees[1 - side],
            // A sits at i with apex term i k a1, B at j with i j b1, C at k
            // with j k c1.
            GroupKind::Triangle => self.degrees[(side + 2) % 3],
        }
    }

    /// Number of admissible values of the sequence at position `pos`.
    fn choices(&self, side: usize, pos: usize) -> u32 {
        let hi = if pos == 0 { self.apex_max[side] } else { self.entry_max[side] };
        (hi + 1).saturating_sub(self.entry_min)
    }

    /// Number of signatures in the group.
    pub fn signature_count(&self) -> BigUint {
        let mut total = BigUint::one();
        for s in 0..self.sides() {
            for pos in 0..self.side_len(s) {
                total *= self.choices(s, pos);
            }
        }
        total
    }
}

fn rows(text: &str, width: usize) -> Result<Vec<Vec<u32>>, DualError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let row: Result<Vec<u32>, _> = l.split_whitespace().map(str::parse).collect();
            match row {
                Ok(r) if r.len() == width => Ok(r),
                _ => Err(DualError::Data(format!("bad row {l:?}"))),
            }
        })
        .collect()
}

/// A program's enumeration: which groups to check, and where they came from.
#[derive(Debug, Clone, Serialize)]
pub struct CaseSpace {
    pub program: DualProgram,
    pub source: String,
    /// Number of table rows (pairs or unordered triplets).
    pub table_rows: usize,
    pub groups: Vec<CaseGroup>,
}

impl CaseSpace {
    /// The shipped brute-force tables.
    pub fn table(program: DualProgram) -> Self {
        let parsed = match program {
            DualProgram::Gen2 => rows(GEN2_PAIRS, 5),
            DualProgram::Gen3 => rows(GEN3_TRIPLETS, 3),
            DualProgram::R4 => rows(R4_PAIRS, 3),
            DualProgram::R5 => rows(R5_PAIRS, 3),
        }
        .expect("shipped tables parse");
        let table_rows = parsed.len();
        let groups = match program {
            DualProgram::Gen2 => parsed.iter().map(|r| CaseGroup::edge(r[0], r[1], r[2], r[3], r[4])).collect(),
            DualProgram::Gen3 => parsed
                .iter()
                .flat_map(|r| triangle_orientations(r[0], r[1], r[2], GEN3_ENTRY_MAX))
                .collect(),
            DualProgram::R4 | DualProgram::R5 => {
                parsed.iter().map(|r| CaseGroup::edge(r[0], r[1], r[2], r[2], r[2])).collect()
            }
        };
        Self {
            program,
            source: "table".into(),
            table_rows,
            groups,
        }
    }

    /// All degree combinations up to `max_degree`, entries up to `max_entry`.
    pub fn boxed(program: DualProgram, max_degree: u32, max_entry: u32) -> Self {
        let mut groups = Vec::new();
        let mut table_rows = 0;
        for i in MIN_ENTRY..=max_degree {
            for j in i..=max_degree {
                if program.is_triangle() {
                    for k in j..=max_degree {
                        table_rows += 1;
                        groups.extend(triangle_orientations(i, j, k, max_entry));
                    }
                } else {
                    table_rows += 1;
                    groups.push(CaseGroup::edge(i, j, max_entry, max_entry, max_entry));
                }
            }
        }
        Self {
            program,
            source: format!("box(degree<={max_degree}, entry<={max_entry})"),
            table_rows,
            groups,
        }
    }

    pub fn signature_count(&self) -> BigUint {
        self.groups.iter().map(CaseGroup::signature_count).sum()
    }
}

/// The distinct cyclic orientations of a sorted triplet: `(i,j,k)` and
/// `(i,k,j)`, which coincide when two degrees agree.
pub fn triangle_orientations(i: u32, j: u32, k: u32, max: u32) -> Vec<CaseGroup> {
    let canon = |t: [u32; 3]| -> [u32; 3] {
        (0..3).map(|r| [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]).min().expect("three rotations")
    };
    let first = canon([i, j, k]);
    let second = canon([i, k, j]);
    let mut out = vec![CaseGroup::triangle(first[0], first[1], first[2], max)];
    if second != first {
        out.push(CaseGroup::triangle(second[0], second[1], second[2], max));
    }
    out
}

fn lnx_over_x(x: u32) -> f64 {
    (x as f64).ln() / x as f64
}

/// Pairs `i <= j` whose constraint is not already negative with every
/// entry at 6 and the probability term dropped.
pub fn gen2_screen(cert: &DualCertificate, max_degree: u32) -> Vec<(u32, u32)> {
    let [m1, m2, _, _] = cert.mu.0;
    let [l1, l2, l3, _] = cert.lambda;
    let mut out = Vec::new();
    for i in MIN_ENTRY..=max_degree {
        for j in i..=max_degree {
            let v = m1 * (lnx_over_x(i) + lnx_over_x(j)) - l1 * (1.0 / i as f64 + 1.0 / j as f64)
                + 2.0 * (m2 * 6f64.ln() - l2) / 6.0
                - l3;
            if v >= 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

/// Triplets `i <= j <= k` analogous to [`gen2_screen`].
pub fn gen3_screen(cert: &DualCertificate, max_degree: u32) -> Vec<(u32, u32, u32)> {
    let [_, _, m3, m4] = cert.mu.0;
    let [l1, l2, l3, _] = cert.lambda;
    let term = |d: u32| m3 * lnx_over_x(d) - l1 / d as f64 + (m4 * 6f64.ln() - l2) / 6.0;
    let mut out = Vec::new();
    for i in MIN_ENTRY..=max_degree {
        for j in i..=max_degree {
            for k in j..=max_degree {
                if term(i) + term(j) + term(k) - l3 >= 0.0 {
                    out.push((i, j, k));
                }
            }
        }
    }
    out
}

/// Pairs for the restricted programs, entries at 3.
pub fn restricted_screen(cert: &DualCertificate, max_degree: u32) -> Vec<(u32, u32)> {
    let [m1, m2, _, _] = cert.mu.0;
    let [l1, l2, l3, _] = cert.lambda;
    let mut out = Vec::new();
    for i in MIN_ENTRY..=max_degree {
        for j in i..=max_degree {
            let v = m1 * (lnx_over_x(i) + lnx_over_x(j)) - l1 * (1.0 / i as f64 + 1.0 / j as f64)
                + 2.0 * (m2 * 3f64.ln() - l2) / 3.0
                - l3;
            if v >= 0.0 {
                out.push((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        assert_eq!(CaseSpace::table(DualProgram::Gen2).table_rows, 83);
        assert_eq!(CaseSpace::table(DualProgram::Gen3).table_rows, 82);
        assert_eq!(CaseSpace::table(DualProgram::R4).table_rows, 14);
        assert_eq!(CaseSpace::table(DualProgram::R5).table_rows, 15);
    }

    #[test]
    fn triangle_orientation_dedup() {
        assert_eq!(triangle_orientations(4, 4, 4, 7).len(), 1);
        assert_eq!(triangle_orientations(4, 4, 5, 7).len(), 1);
        let two = triangle_orientations(3, 4, 5, 7);
        assert_eq!(two[0].degrees, vec![3, 4, 5]);
        assert_eq!(two[1].degrees, vec![3, 5, 4]);
    }

    #[test]
    fn partners_follow_apex_terms() {
        let g = CaseGroup::triangle(3, 4, 5, 7);
        assert_eq!((g.partner(0), g.partner(1), g.partner(2)), (5, 3, 4));
        let e = CaseGroup::edge(3, 7, 7, 7, 8);
        assert_eq!((e.partner(0), e.partner(1)), (7, 3));
        assert_eq!((e.side_len(0), e.side_len(1)), (2, 6));
        // a1: 5 values, a2: 5 values, b1: 5, b2..b6: 6 each.
        assert_eq!(e.signature_count(), BigUint::from(5u32.pow(3) * 6u32.pow(5)));
    }

    #[test]
    fn screens_reproduce_tables() {
        let gen2 = gen2_screen(&DualCertificate::builtin(DualProgram::Gen2), 60);
        assert_eq!(gen2.len(), 83);
        let table: Vec<(u32, u32)> = CaseSpace::table(DualProgram::Gen2)
            .groups
            .iter()
            .map(|g| (g.degrees[0], g.degrees[1]))
            .collect();
        assert_eq!(gen2, {
            let mut t = table;
            t.sort();
            t
        });
        let gen3 = gen3_screen(&DualCertificate::builtin(DualProgram::Gen3), 60);
        assert_eq!(gen3.len(), 90);
        let r4 = restricted_screen(&DualCertificate::builtin(DualProgram::R4), 60);
        assert_eq!(r4.len(), 14);
    }

    #[test]
    fn box_space() {
        let b = CaseSpace::boxed(DualProgram::R4, 4, 4);
        assert_eq!(b.table_rows, 3);
        assert_eq!(b.signature_count(), BigUint::from(16u32 + 32 + 64));
    }
}
