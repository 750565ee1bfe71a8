//! Certificate verification over the shipped case spaces.
//!
//! Guarantees come in two strengths. Inside a case space every signature is
//! covered: each group's maximum is computed exactly by [`group_max`], and
//! verdicts near zero are settled in high precision. Beyond the tables the
//! report only carries sampled evidence along rays of growing degree.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use super::cases::{CaseGroup, CaseSpace, GroupKind};
use super::hp::dual_lhs_hp;
use super::sides::{group_max, GroupMax};
use super::{dual_lhs, edge_sig, objective, triangle_sig, CaseSignature, DualCertificate, DualError, DualProgram};
use crate::util::serde_big;

/// A certificate is feasible iff its maximum left-hand side is `<= -EPSILON`.
pub const EPSILON: f64 = 1e-9;

/// Group maxima closer to zero than this are recomputed in high precision.
pub const HP_WINDOW: f64 = 1e-6;

/// Pairs whose full combination space is also enumerated one signature at
/// a time.
pub const GEN2_BRUTE_FORCE_PAIRS: [(u32, u32); 3] = [(6, 6), (5, 6), (5, 7)];

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Case space to enumerate; `None` uses the shipped table.
    pub space: Option<CaseSpace>,
    pub tail: bool,
    pub rederive_bounds: bool,
    /// Cross-check the designated groups by plain enumeration.
    pub brute_force: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            space: None,
            tail: true,
            rederive_bounds: false,
            brute_force: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteForceCheck {
    pub group: String,
    #[serde(with = "serde_big")]
    pub cases: BigUint,
    pub dp_max: f64,
    pub brute_max: f64,
    pub brute_argmax: CaseSignature,
    pub agree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailRay {
    pub label: String,
    #[serde(skip)]
    pub points: Vec<CaseSignature>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailCheck {
    pub ray: String,
    pub points: usize,
    pub max_lhs: f64,
    pub all_negative: bool,
    pub nonincreasing: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RederivedBound {
    pub group: String,
    pub side: usize,
    /// `"apex"` for the first entry, `"entry"` for the others.
    pub slot: &'static str,
    pub derived: u32,
    pub shipped: u32,
    /// The derived maximiser lies within the shipped bound.
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Guarantees {
    pub enumerative: String,
    pub sampled: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub program: DualProgram,
    pub certificate: DualCertificate,
    pub objective: f64,
    pub case_space: String,
    pub table_rows: usize,
    pub groups_checked: usize,
    #[serde(with = "serde_big")]
    pub cases_checked: BigUint,
    pub max_lhs: f64,
    pub argmax: String,
    pub argmax_group: String,
    pub feasible: bool,
    pub margin: f64,
    pub epsilon: f64,
    pub hp_reevaluated: usize,
    pub relaxed_groups: Vec<String>,
    pub brute_force: Vec<BruteForceCheck>,
    pub tail_checks: Vec<TailCheck>,
    pub tails_passed: Option<bool>,
    pub rederived_bounds: Vec<RederivedBound>,
    pub guarantees: Guarantees,
    pub group_maxima: Vec<GroupMax>,
}

/// Evaluates every group of the case space and reduces deterministically:
/// largest value first, then the smaller signature.
fn evaluate(cert: &DualCertificate, space: &CaseSpace) -> (Vec<GroupMax>, usize) {
    let mut maxima: Vec<GroupMax> = space.groups.par_iter().map(|g| group_max(cert, g)).collect();
    let mut hp = 0;
    for m in maxima.iter_mut() {
        if m.exact && m.lhs.abs() < HP_WINDOW {
            if let Ok(v) = dual_lhs_hp(cert, &m.argmax) {
                m.lhs = v;
                hp += 1;
            }
        }
    }
    (maxima, hp)
}

fn best(maxima: &[GroupMax]) -> Option<&GroupMax> {
    maxima.iter().reduce(|a, b| {
        if b.lhs > a.lhs || (b.lhs == a.lhs && b.argmax < a.argmax) {
            b
        } else {
            a
        }
    })
}

pub fn verify_certificate(cert: &DualCertificate, options: &VerifyOptions) -> Result<VerificationReport, DualError> {
    cert.validate()?;
    let space = options.space.clone().unwrap_or_else(|| CaseSpace::table(cert.variant));
    if space.program != cert.variant {
        return Err(DualError::Certificate(format!(
            "case space is for {}, certificate for {}",
            space.program, cert.variant
        )));
    }
    let (maxima, hp_reevaluated) = evaluate(cert, &space);
    let top = best(&maxima).ok_or_else(|| DualError::Data("empty case space".into()))?;
    let (max_lhs, argmax, argmax_group) = (top.lhs, top.argmax.to_string(), top.group.clone());
    let relaxed_groups = maxima.iter().filter(|m| !m.exact).map(|m| m.group.clone()).collect();

    let mut brute = Vec::new();
    if options.brute_force && cert.variant == DualProgram::Gen2 {
        for (i, j) in GEN2_BRUTE_FORCE_PAIRS {
            if let Some((g, m)) = space
                .groups
                .iter()
                .zip(&maxima)
                .find(|(g, _)| g.degrees == [i, j] || g.degrees == [j, i])
            {
                let (brute_max, brute_argmax) = brute_force_group(cert, g)?;
                let dp = group_max(cert, g).lhs;
                brute.push(BruteForceCheck {
                    group: m.group.clone(),
                    cases: g.signature_count(),
                    dp_max: dp,
                    brute_max,
                    brute_argmax,
                    agree: (dp - brute_max).abs() <= 1e-12,
                });
            }
        }
    }

    let tail_checks = if options.tail {
        tail_check(cert, &tail_rays(cert.variant))
    } else {
        Vec::new()
    };
    let tails_passed = options.tail.then(|| tail_checks.iter().all(|t| t.passed));
    let rederived_bounds = if options.rederive_bounds {
        rederive_bounds(cert, &space)
    } else {
        Vec::new()
    };

    Ok(VerificationReport {
        program: cert.variant,
        certificate: cert.clone(),
        objective: objective(cert),
        case_space: space.source.clone(),
        table_rows: space.table_rows,
        groups_checked: space.groups.len(),
        cases_checked: space.signature_count(),
        max_lhs,
        argmax,
        argmax_group,
        feasible: max_lhs <= -EPSILON,
        margin: -max_lhs,
        epsilon: EPSILON,
        hp_reevaluated,
        relaxed_groups,
        brute_force: brute,
        tail_checks,
        tails_passed,
        rederived_bounds,
        guarantees: Guarantees {
            enumerative: format!(
                "every signature of the {} case space ({} groups), exact per-group maxima",
                space.source,
                space.groups.len()
            ),
            sampled: "degrees beyond the case space: rays of growing degree, numeric evidence only".into(),
        },
        group_maxima: maxima,
    })
}

/// Maximum over a group by evaluating every signature separately.
pub fn brute_force_group(cert: &DualCertificate, group: &CaseGroup) -> Result<(f64, CaseSignature), DualError> {
    let lens: Vec<usize> = (0..group.sides()).map(|s| group.side_len(s)).collect();
    let ranges: Vec<Vec<(u32, u32)>> = (0..group.sides())
        .map(|s| {
            (0..lens[s])
                .map(|p| (group.entry_min, if p == 0 { group.apex_max[s] } else { group.entry_max[s] }))
                .collect()
        })
        .collect();
    let all_sequences = |s: usize| -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for &(lo, hi) in &ranges[s] {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (lo..=hi).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    };
    let seqs: Vec<Vec<Vec<u32>>> = (0..group.sides()).map(all_sequences).collect();
    let d = &group.degrees;
    let make = |a: &[u32], rest: &[&Vec<u32>]| -> CaseSignature {
        match group.kind {
            GroupKind::Edge => edge_sig(d[0], d[1], a.to_vec(), rest[0].clone()),
            GroupKind::Triangle => triangle_sig(d[0], d[1], d[2], a.to_vec(), rest[0].clone(), rest[1].clone()),
        }
    };
    let results: Result<Vec<(f64, CaseSignature)>, DualError> = seqs[0]
        .par_iter()
        .map(|a| {
            let mut best: Option<(f64, CaseSignature)> = None;
            let mut consider = |rest: &[&Vec<u32>]| -> Result<(), DualError> {
                let sig = make(a, rest);
                let v = dual_lhs(cert, &sig)?;
                if best.as_ref().map_or(true, |(bv, bs)| v > *bv || (v == *bv && sig < *bs)) {
                    best = Some((v, sig));
                }
                Ok(())
            };
            for b in &seqs[1] {
                if group.kind == GroupKind::Triangle {
                    for c in &seqs[2] {
                        consider(&[b, c])?;
                    }
                } else {
                    consider(&[b])?;
                }
            }
            Ok(best.expect("nonempty group"))
        })
        .collect();
    results?
        .into_iter()
        .reduce(|x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
        .ok_or_else(|| DualError::Data("empty group".into()))
}

fn regular_edge(i: u32, j: u32, entry: u32) -> CaseSignature {
    edge_sig(i, j, vec![entry; i as usize - 1], vec![entry; j as usize - 1])
}

/// Rays of signatures beyond the case space, with the remaining entries at
/// their extremal value (6 for the general problem, 3 for the restricted).
pub fn tail_rays(program: DualProgram) -> Vec<TailRay> {
    let mut rays = Vec::new();
    match program {
        DualProgram::Gen2 => {
            for j in 3..=30 {
                rays.push(TailRay {
                    label: format!("j={j}, i=31..200, entries 6"),
                    points: (31..=200).map(|i| regular_edge(j, i, 6)).collect(),
                });
            }
        }
        DualProgram::Gen3 => {
            for i in 3..=13 {
                for j in i..=13 {
                    rays.push(TailRay {
                        label: format!("i={i}, j={j}, k=14..200, entries 6"),
                        points: (14..=200u32)
                            .map(|k| {
                                triangle_sig(
                                    i,
                                    j,
                                    k,
                                    vec![6; i as usize - 2],
                                    vec![6; j as usize - 2],
                                    vec![6; k as usize - 2],
                                )
                            })
                            .collect(),
                    });
                }
            }
        }
        DualProgram::R4 | DualProgram::R5 => {
            let start = if program == DualProgram::R4 { 10 } else { 11 };
            for j in 3..=12 {
                rays.push(TailRay {
                    label: format!("j={j}, i={start}..100, entries 3"),
                    points: (start..=100).map(|i| regular_edge(j, i, 3)).collect(),
                });
            }
        }
    }
    rays
}

/// Non-increase is judged with this slack.
const MONOTONE_SLACK: f64 = 1e-15;

pub fn tail_check(cert: &DualCertificate, rays: &[TailRay]) -> Vec<TailCheck> {
    rays.iter()
        .map(|ray| {
            let values: Vec<f64> = ray
                .points
                .iter()
                .map(|p| dual_lhs(cert, p).unwrap_or(f64::INFINITY))
                .collect();
            let max_lhs = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let all_negative = values.iter().all(|&v| v < 0.0);
            let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
            TailCheck {
                ray: ray.label.clone(),
                points: values.len(),
                max_lhs,
                all_negative,
                nonincreasing,
                passed: all_negative && nonincreasing,
            }
        })
        .collect()
}

/// Largest entry tried when re-deriving bounds.
const REDERIVE_LIMIT: u32 = 60;

/// For every group side, maximises the constraint over one free entry with
/// the others at the base value, and compares the maximiser with the
/// shipped bound. Informational only.
pub fn rederive_bounds(cert: &DualCertificate, space: &CaseSpace) -> Vec<RederivedBound> {
    let base = match cert.variant {
        DualProgram::Gen2 | DualProgram::Gen3 => 6,
        DualProgram::R4 | DualProgram::R5 => 3,
    };
    let mut out = Vec::new();
    for g in &space.groups {
        for side in 0..g.sides() {
            let len = g.side_len(side);
            let slots: Vec<(&'static str, usize, u32)> = if g.kind == GroupKind::Edge && cert.variant == DualProgram::Gen2 {
                let mut v = vec![("apex", 0, g.apex_max[side])];
                if len > 1 {
                    v.push(("entry", len / 2, g.entry_max[side]));
                }
                v
            } else {
                vec![("entry", len / 2, g.entry_max[side])]
            };
            for (slot, pos, shipped) in slots {
                let mut seqs: Vec<Vec<u32>> = (0..g.sides()).map(|s| vec![base; g.side_len(s)]).collect();
                let mut best = (f64::NEG_INFINITY, base);
                for x in g.entry_min..=REDERIVE_LIMIT {
                    seqs[side][pos] = x;
                    let d = &g.degrees;
                    let sig = match g.kind {
                        GroupKind::Edge => edge_sig(d[0], d[1], seqs[0].clone(), seqs[1].clone()),
                        GroupKind::Triangle => {
                            triangle_sig(d[0], d[1], d[2], seqs[0].clone(), seqs[1].clone(), seqs[2].clone())
                        }
                    };
                    if let Ok(v) = dual_lhs(cert, &sig) {
                        if v > best.0 {
                            best = (v, x);
                        }
                    }
                }
                out.push(RederivedBound {
                    group: g.label(),
                    side,
                    slot,
                    derived: best.1,
                    shipped,
                    within: best.1 <= shipped,
                });
            }
        }
    }
    out
}
