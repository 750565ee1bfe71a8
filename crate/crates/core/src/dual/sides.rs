//! Exact maximisation of a dual constraint over a case group.
//!
//! For fixed degrees the constraint splits into per-side contributions: a
//! term `s` entering the probability through `ln(1 - c e^(-sum s))` and a
//! linear term `lin`. The left-hand side increases in both, so the maximum
//! over a group is attained at a combination of per-side Pareto-optimal
//! `(s, lin)` points. Each side's front is built by dynamic programming
//! over positions, with the last entry as state because the consecutive-pair
//! factors couple neighbouring entries.

use serde::Serialize;

use super::cases::{CaseGroup, GroupKind};
use super::{ln_one_minus, CaseSignature, DualCertificate, DualProgram};
use crate::signatures::{Signature2, Signature3};

/// Largest front kept per DP state before points are merged into
/// dominating (relaxed) points.
pub const STATE_CAP: usize = 20_000;

/// Per-entry tables for one side of one group.
struct SideModel {
    len: usize,
    lo: u32,
    apex_hi: u32,
    hi: u32,
    unary: Vec<f64>,
    apex: Vec<f64>,
    pair: Option<Vec<Vec<f64>>>,
    lin: Vec<f64>,
}

fn ln1m(x: f64) -> f64 {
    (-x).ln_1p()
}

impl SideModel {
    fn new(cert: &DualCertificate, group: &CaseGroup, side: usize) -> Self {
        let d = group.degrees[side];
        let p = group.partner(side);
        let (lo, apex_hi, hi) = (group.entry_min, group.apex_max[side], group.entry_max[side]);
        let top = apex_hi.max(hi) as usize;
        let df = d as f64;
        let [_, m2, _, m4] = cert.mu.0;
        let l2 = cert.lambda[1];
        let table = |f: &dyn Fn(f64) -> f64| -> Vec<f64> { (0..=top).map(|x| if x == 0 { 0.0 } else { f(x as f64) }).collect() };
        let pair_table = |w: f64| -> Vec<Vec<f64>> {
            (0..=top)
                .map(|x| (0..=top).map(|y| if x * y == 0 { 0.0 } else { w * ln1m(2.0 / (df * x as f64 * y as f64)) }).collect())
                .collect()
        };
        let zero = table(&|_| 0.0);
        let (unary, apex, pair, lin) = match cert.variant {
            DualProgram::Gen2 => (
                table(&|x| 0.5 * ln1m(1.0 / (df * x))),
                table(&|x| ln1m(2.0 / (df * p as f64 * x))),
                Some(pair_table(1.0)),
                table(&|x| (m2 * x.ln() - l2) / (x * (df - 1.0))),
            ),
            DualProgram::Gen3 => (
                zero,
                table(&|x| 0.5 * ln1m(2.0 / (df * p as f64 * x))),
                Some(pair_table(0.5)),
                table(&|x| (m4 * x.ln() - l2) / (x * (df - 2.0))),
            ),
            DualProgram::R4 | DualProgram::R5 => {
                let mut lin = table(&|x| (m2 * x.ln() - l2) / (x * (df - 1.0)));
                if cert.variant == DualProgram::R5 && r5_side_counts_threes(group, side) && top >= 3 {
                    lin[3] += cert.lambda[3];
                }
                (table(&|x| 0.5 * ln1m(1.0 / (df * x))), zero, None, lin)
            }
        };
        Self {
            len: group.side_len(side),
            lo,
            apex_hi,
            hi,
            unary,
            apex,
            pair,
            lin,
        }
    }
}

/// Whether `-lambda4 E` gives this side `+lambda4` per entry equal to 3.
fn r5_side_counts_threes(group: &CaseGroup, side: usize) -> bool {
    let own = group.degrees[side];
    let other = group.degrees[1 - side];
    own == 3 && (other == 3 || other >= 4)
}

/// Constant part of a group's constraint and the factor `c` of the
/// probability term.
fn group_constant(cert: &DualCertificate, group: &CaseGroup) -> (f64, f64) {
    let [m1, _, m3, _] = cert.mu.0;
    let [l1, _, l3, l4] = cert.lambda;
    let lx = |d: u32| (d as f64).ln() / d as f64;
    let inv = |d: u32| 1.0 / d as f64;
    let degs = &group.degrees;
    match group.kind {
        GroupKind::Edge => {
            let mut k = m1 * (lx(degs[0]) + lx(degs[1])) - l1 * (inv(degs[0]) + inv(degs[1])) - l3;
            if cert.variant == DualProgram::R5 && degs[0] == 3 && degs[1] == 3 {
                k -= 4.0 * l4;
            }
            (k, 1.0 / (degs[0] as f64 * degs[1] as f64))
        }
        GroupKind::Triangle => {
            let k = m3 * degs.iter().map(|&d| lx(d)).sum::<f64>() - l1 * degs.iter().map(|&d| inv(d)).sum::<f64>() - l3;
            (k, 2.0 / degs.iter().map(|&d| d as f64).product::<f64>())
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    lin: f64,
    parent: u32,
    value: u8,
}

/// Keeps the points not dominated in `(s, lin)`; returns them sorted by
/// decreasing `s` (hence increasing `lin`).
fn pareto(mut pts: Vec<Node>) -> Vec<Node> {
    pts.sort_by(|a, b| b.s.total_cmp(&a.s).then(b.lin.total_cmp(&a.lin)));
    let mut out: Vec<Node> = Vec::new();
    for p in pts {
        if out.last().map_or(true, |q| p.lin > q.lin) {
            out.push(p);
        }
    }
    out
}

/// Merges neighbouring points into points dominating both until the front
/// fits the cap. Returns whether anything was merged.
fn relax(front: &mut Vec<Node>) -> bool {
    if front.len() <= STATE_CAP {
        return false;
    }
    while front.len() > STATE_CAP {
        let merged: Vec<Node> = front
            .chunks(2)
            .map(|c| {
                let last = c[c.len() - 1];
                Node { lin: last.lin, ..c[0] }
            })
            .collect();
        *front = merged;
    }
    true
}

/// Pareto front of one side, with the sequence realising each point.
#[derive(Debug, Clone, Serialize)]
pub struct SideFront {
    pub points: Vec<(f64, f64)>,
    #[serde(skip)]
    pub sequences: Vec<Vec<u32>>,
    /// True when the cap forced merging; points then bound, rather than
    /// equal, the true front.
    pub relaxed: bool,
}

fn side_front(model: &SideModel) -> SideFront {
    if model.len == 0 {
        return SideFront {
            points: vec![(0.0, 0.0)],
            sequences: vec![vec![]],
            relaxed: false,
        };
    }
    let top = model.apex_hi.max(model.hi) as usize;
    let mut relaxed = false;
    // layers[t] holds every node at position t; states[x] indexes the front
    // of sequences ending in x.
    let mut layers: Vec<Vec<Node>> = Vec::with_capacity(model.len);
    let mut states: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    let mut first = Vec::new();
    for x in model.lo..=model.apex_hi {
        let xi = x as usize;
        first.push(Node {
            s: model.unary[xi] + model.apex[xi],
            lin: model.lin[xi],
            parent: u32::MAX,
            value: x as u8,
        });
    }
    if model.pair.is_some() {
        layers.push(first.clone());
        for (idx, n) in first.iter().enumerate() {
            states[n.value as usize].push(idx as u32);
        }
    } else {
        // Without pair terms the last entry carries no information.
        let mut f = pareto(first);
        relaxed |= relax(&mut f);
        states[0] = (0..f.len() as u32).collect();
        layers.push(f);
    }
    for _ in 1..model.len {
        let prev = layers.last().expect("nonempty");
        let mut layer: Vec<Node> = Vec::new();
        let mut next_states: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
        match &model.pair {
            Some(pair) => {
                for x in model.lo..=model.hi {
                    let xi = x as usize;
                    let mut cand = Vec::new();
                    for v in model.lo..=model.apex_hi.max(model.hi) {
                        let vi = v as usize;
                        for &idx in &states[vi] {
                            let n = prev[idx as usize];
                            cand.push(Node {
                                s: n.s + pair[vi][xi] + model.unary[xi],
                                lin: n.lin + model.lin[xi],
                                parent: idx,
                                value: x as u8,
                            });
                        }
                    }
                    let mut f = pareto(cand);
                    relaxed |= relax(&mut f);
                    let base = layer.len() as u32;
                    next_states[xi] = (base..base + f.len() as u32).collect();
                    layer.extend(f);
                }
            }
            None => {
                let mut cand = Vec::new();
                for &idx in &states[0] {
                    let n = prev[idx as usize];
                    for x in model.lo..=model.hi {
                        let xi = x as usize;
                        cand.push(Node {
                            s: n.s + model.unary[xi],
                            lin: n.lin + model.lin[xi],
                            parent: idx,
                            value: x as u8,
                        });
                    }
                }
                let mut f = pareto(cand);
                relaxed |= relax(&mut f);
                next_states[0] = (0..f.len() as u32).collect();
                layer = f;
            }
        }
        layers.push(layer);
        states = next_states;
    }
    let last = layers.last().expect("nonempty");
    let mut finals: Vec<Node> = Vec::new();
    let mut tagged: Vec<(Node, u32)> = Vec::new();
    for idx in states.iter().flatten() {
        tagged.push((last[*idx as usize], *idx));
    }
    // Reduce with the index kept in `parent` so sequences can be rebuilt.
    for (n, idx) in &tagged {
        finals.push(Node { parent: *idx, ..*n });
    }
    let finals = pareto(finals);
    let mut points = Vec::with_capacity(finals.len());
    let mut sequences = Vec::with_capacity(finals.len());
    for f in finals {
        points.push((f.s, f.lin));
        let mut seq = Vec::with_capacity(model.len);
        let mut idx = f.parent;
        for t in (0..model.len).rev() {
            let n = layers[t][idx as usize];
            seq.push(n.value as u32);
            idx = n.parent;
        }
        seq.reverse();
        sequences.push(seq);
    }
    SideFront {
        points,
        sequences,
        relaxed,
    }
}

/// Maximum of the dual constraint over one group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupMax {
    pub group: String,
    pub lhs: f64,
    pub argmax: CaseSignature,
    /// False when a front was relaxed; `lhs` is then an upper bound and
    /// `argmax` is only indicative.
    pub exact: bool,
    pub front_sizes: Vec<usize>,
}

/// Combines fronts `a` and `b` into the front of sums, remembering the
/// pair of indices for each point.
fn minkowski(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64, usize, usize)> {
    let mut nodes = Vec::with_capacity(a.len() * b.len());
    let mut origin = Vec::with_capacity(a.len() * b.len());
    for (ia, pa) in a.iter().enumerate() {
        for (ib, pb) in b.iter().enumerate() {
            nodes.push(Node {
                s: pa.0 + pb.0,
                lin: pa.1 + pb.1,
                parent: origin.len() as u32,
                value: 0,
            });
            origin.push((ia, ib));
        }
    }
    pareto(nodes)
        .into_iter()
        .map(|n| {
            let (ia, ib) = origin[n.parent as usize];
            (n.s, n.lin, ia, ib)
        })
        .collect()
}

pub fn group_max(cert: &DualCertificate, group: &CaseGroup) -> GroupMax {
    let fronts: Vec<SideFront> = (0..group.sides())
        .map(|s| side_front(&SideModel::new(cert, group, s)))
        .collect();
    let (k, c) = group_constant(cert, group);
    let relaxed = fronts.iter().any(|f| f.relaxed);
    let front_sizes = fronts.iter().map(|f| f.points.len()).collect();
    // Combined front over all but the last side, then scan against the last.
    let mut combined: Vec<(f64, f64, Vec<usize>)> = fronts[0]
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.0, p.1, vec![i]))
        .collect();
    for f in &fronts[1..fronts.len() - 1] {
        let pts: Vec<(f64, f64)> = combined.iter().map(|c| (c.0, c.1)).collect();
        combined = minkowski(&pts, &f.points)
            .into_iter()
            .map(|(s, lin, ia, ib)| {
                let mut idx = combined[ia].2.clone();
                idx.push(ib);
                (s, lin, idx)
            })
            .collect();
    }
    let last = &fronts[fronts.len() - 1];
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = (0, 0);
    for (ci, cpt) in combined.iter().enumerate() {
        for (li, lpt) in last.points.iter().enumerate() {
            let v = ln_one_minus(c, cpt.0 + lpt.0) + cpt.1 + lpt.1 + k;
            if v > best {
                best = v;
                best_idx = (ci, li);
            }
        }
    }
    let mut picks = combined[best_idx.0].2.clone();
    picks.push(best_idx.1);
    let seqs: Vec<Vec<u32>> = picks.iter().enumerate().map(|(s, &p)| fronts[s].sequences[p].clone()).collect();
    let d = &group.degrees;
    let argmax = match group.kind {
        GroupKind::Edge => CaseSignature::Edge(Signature2 {
            i: d[0],
            j: d[1],
            a: seqs[0].clone(),
            b: seqs[1].clone(),
        }),
        GroupKind::Triangle => CaseSignature::Triangle(Signature3 {
            i: d[0],
            j: d[1],
            k: d[2],
            a: seqs[0].clone(),
            b: seqs[1].clone(),
            c: seqs[2].clone(),
        }),
    };
    GroupMax {
        group: group.label(),
        lhs: best,
        argmax,
        exact: !relaxed,
        front_sizes,
    }
}
