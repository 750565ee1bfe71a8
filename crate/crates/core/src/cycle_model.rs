//! The random outdegree-one model.
//!
//! Every vertex except the root picks one incident edge uniformly and orients
//! it away from itself. Acyclic outcomes are exactly the spanning trees
//! oriented towards the root, so `t(G) = P_nc * prod_{v != root} d_v`.
//!
//! Besides sampling and exact `P_nc`, this module enumerates all selections
//! of small graphs to check the two dependency lemmas for cycle events with
//! exact rational arithmetic.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Adjacency;
use crate::kirchhoff::{count_spanning_trees, CountError};
use crate::util::{big_ratio, product_u64, rational_to_f64, serde_big};

/// One outgoing edge per non-root vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdgSelection {
    pub root: usize,
    pub out: Vec<Option<usize>>,
}

pub fn sample_outdegree_one<G: Adjacency, R: Rng>(g: &G, root: usize, rng: &mut R) -> OdgSelection {
    let out = (0..g.vertex_count())
        .map(|v| {
            if v == root {
                None
            } else {
                let nbs = g.neighbors(v);
                Some(nbs[rng.gen_range(0..nbs.len())])
            }
        })
        .collect();
    OdgSelection { root, out }
}

pub fn has_cycle(sel: &OdgSelection) -> bool {
    functional_cycle(&sel.out)
}

fn functional_cycle(out: &[Option<usize>]) -> bool {
    // 0 = unseen, 1 = on the current path, 2 = known to reach a sink.
    let n = out.len();
    let mut state = vec![0u8; n];
    let mut path = Vec::new();
    for start in 0..n {
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            match out[v] {
                Some(w) => v = w,
                None => break,
            }
        }
        if state[v] == 1 && out[v].is_some() {
            return true;
        }
        for p in path.drain(..) {
            state[p] = 2;
        }
    }
    false
}

/// Fraction of `samples` random selections that are acyclic.
pub fn estimate_pnc<G: Adjacency>(g: &G, root: usize, samples: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acyclic = 0u64;
    for _ in 0..samples {
        if !has_cycle(&sample_outdegree_one(g, root, &mut rng)) {
            acyclic += 1;
        }
    }
    acyclic as f64 / samples.max(1) as f64
}

/// `t(G) / prod_{v != root} d_v`.
pub fn exact_pnc<G: Adjacency>(g: &G, root: usize) -> Result<BigRational, CountError> {
    if root >= g.vertex_count() {
        return Err(CountError::BadVertex(root));
    }
    let t = count_spanning_trees(g)?;
    Ok(big_ratio(&t, &selection_count(g, Some(root))))
}

/// Number of outdegree-one selections.
pub fn selection_count<G: Adjacency>(g: &G, root: Option<usize>) -> BigUint {
    product_u64((0..g.vertex_count()).filter(|&v| Some(v) != root).map(|v| g.degree(v)))
}

/// The event that a given cycle appears (in either orientation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleEvent {
    /// Cycle vertices in walk order, starting at the smallest id.
    pub vertices: Vec<usize>,
    #[serde(with = "serde_big::rational")]
    pub prob: BigRational,
}

impl CycleEvent {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn shares_vertex(&self, other: &CycleEvent) -> bool {
        self.vertices.iter().any(|v| other.vertices.contains(v))
    }

    fn occurs(&self, out: &[usize]) -> bool {
        let c = &self.vertices;
        let k = c.len();
        let forward = (0..k).all(|p| out[c[p]] == c[(p + 1) % k]);
        forward || (k > 2 && (0..k).all(|p| out[c[(p + 1) % k]] == c[p]))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EventSystem {
    pub root: Option<usize>,
    pub events: Vec<CycleEvent>,
}

impl EventSystem {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events are dependent iff their cycles share a vertex.
    pub fn dependent(&self, i: usize, j: usize) -> bool {
        self.events[i].shares_vertex(&self.events[j])
    }
}

/// All cycles of length `2..=max_len` avoiding the root. With `root = None`
/// every vertex chooses an out-edge. Length-2 cycles are the edges.
pub fn build_event_system<G: Adjacency>(g: &G, root: Option<usize>, max_len: usize) -> EventSystem {
    let n = g.vertex_count();
    let deg = |v: usize| g.degree(v) as i64;
    let mut events = Vec::new();
    if max_len >= 2 {
        for (u, v) in g.edges() {
            if Some(u) != root && Some(v) != root {
                events.push(CycleEvent {
                    vertices: vec![u, v],
                    prob: BigRational::new(BigInt::one(), BigInt::from(deg(u) * deg(v))),
                });
            }
        }
    }
    if max_len >= 3 {
        let mut cycles = Vec::new();
        for start in 0..n {
            if Some(start) == root {
                continue;
            }
            let mut path = vec![start];
            extend_cycles(g, root, max_len, &mut path, &mut cycles);
        }
        cycles.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for c in cycles {
            let prod: i64 = c.iter().map(|&v| deg(v)).product();
            events.push(CycleEvent {
                vertices: c,
                prob: BigRational::new(BigInt::from(2), BigInt::from(prod)),
            });
        }
    }
    EventSystem { root, events }
}

fn extend_cycles<G: Adjacency>(
    g: &G,
    root: Option<usize>,
    max_len: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let start = path[0];
    let last = *path.last().expect("nonempty path");
    for &w in g.neighbors(last) {
        if w == start && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        }
        if w > start && Some(w) != root && path.len() < max_len && !path.contains(&w) {
            path.push(w);
            extend_cycles(g, root, max_len, path, out);
            path.pop();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{selections} selections exceed the enumeration budget {budget}")]
    Budget { selections: BigUint, budget: u64 },
    #[error("{0} events exceed the 128-event limit of the oracle")]
    TooManyEvents(usize),
    #[error("ordering is not a permutation of the {0} events")]
    BadOrdering(usize),
    #[error("k = {k} outside 1..={len}")]
    BadK { k: usize, len: usize },
}

/// Outcome counts of all outdegree-one selections, grouped by the set of
/// events that occur.
#[derive(Debug, Clone)]
pub struct SelectionTable {
    pub system: EventSystem,
    pub total: u64,
    classes: Vec<(u128, u64)>,
    event_counts: Vec<u64>,
}

impl SelectionTable {
    pub fn build<G: Adjacency>(g: &G, system: EventSystem, budget: u64) -> Result<Self, OracleError> {
        if system.len() > 128 {
            return Err(OracleError::TooManyEvents(system.len()));
        }
        let selections = selection_count(g, system.root);
        let total = selections.to_u64().filter(|&s| s <= budget).ok_or(OracleError::Budget {
            selections: selections.clone(),
            budget,
        })?;
        let choosers: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| Some(v) != system.root)
            .collect();
        let mut digit = vec![0usize; choosers.len()];
        let mut out = vec![usize::MAX; g.vertex_count()];
        for &v in &choosers {
            out[v] = g.neighbors(v)[0];
        }
        let mut map: HashMap<u128, u64> = HashMap::new();
        loop {
            let mut mask = 0u128;
            for (e, ev) in system.events.iter().enumerate() {
                if ev.occurs(&out) {
                    mask |= 1 << e;
                }
            }
            *map.entry(mask).or_insert(0) += 1;
            // Odometer step.
            let mut p = 0;
            loop {
                if p == choosers.len() {
                    let mut classes: Vec<(u128, u64)> = map.into_iter().collect();
                    classes.sort_unstable();
                    let event_counts = (0..system.len())
                        .map(|e| {
                            classes
                                .iter()
                                .filter(|(m, _)| m >> e & 1 == 1)
                                .map(|&(_, c)| c)
                                .sum()
                        })
                        .collect();
                    return Ok(Self {
                        system,
                        total,
                        classes,
                        event_counts,
                    });
                }
                let v = choosers[p];
                digit[p] += 1;
                if digit[p] < g.degree(v) {
                    out[v] = g.neighbors(v)[digit[p]];
                    break;
                }
                digit[p] = 0;
                out[v] = g.neighbors(v)[0];
                p += 1;
            }
        }
    }

    fn frac(&self, count: u64) -> BigRational {
        BigRational::new(BigInt::from(count), BigInt::from(self.total))
    }

    /// `Pr[E_e]` from the enumeration.
    pub fn prob(&self, e: usize) -> BigRational {
        self.frac(self.event_counts[e])
    }

    /// `Pr[no event of `set` occurs]`.
    pub fn prob_none(&self, set: u128) -> BigRational {
        self.frac(self.classes.iter().filter(|(m, _)| m & set == 0).map(|&(_, c)| c).sum())
    }

    /// `Pr[E_e and no event of `set` occurs]`.
    pub fn prob_event_and_none(&self, e: usize, set: u128) -> BigRational {
        self.frac(
            self.classes
                .iter()
                .filter(|(m, _)| m >> e & 1 == 1 && m & set == 0)
                .map(|&(_, c)| c)
                .sum(),
        )
    }

    /// Dependent events never occur together.
    pub fn mutually_exclusive(&self) -> bool {
        let n = self.system.len();
        self.classes.iter().all(|&(m, _)| {
            (0..n).all(|i| {
                m >> i & 1 == 0 || (i + 1..n).all(|j| m >> j & 1 == 0 || !self.system.dependent(i, j))
            })
        })
    }

    /// Each event is independent of the union of all events it shares no
    /// vertex with.
    pub fn union_closed_independence(&self) -> bool {
        let n = self.system.len();
        (0..n).all(|i| {
            let set: u128 = (0..n)
                .filter(|&j| !self.system.dependent(i, j))
                .fold(0, |acc, j| acc | 1 << j);
            self.prob_event_and_none(i, set) == self.prob(i) * self.prob_none(set)
        })
    }

    fn check_ordering(&self, ordering: &[usize]) -> Result<(), OracleError> {
        let n = self.system.len();
        let mut seen = vec![false; n];
        if ordering.len() != n || ordering.iter().any(|&e| e >= n || std::mem::replace(&mut seen[e], true)) {
            return Err(OracleError::BadOrdering(n));
        }
        Ok(())
    }

    /// For each prefix length `l`, the count of selections in which none of
    /// `ordering[..l]` occurs.
    fn prefix_none_counts(&self, ordering: &[usize]) -> Vec<u64> {
        let len = ordering.len();
        let mut rank = vec![usize::MAX; self.system.len()];
        for (p, &e) in ordering.iter().enumerate() {
            rank[e] = p;
        }
        let mut first = vec![0u64; len + 1];
        for &(m, c) in &self.classes {
            let f = (0..self.system.len())
                .filter(|&e| m >> e & 1 == 1)
                .map(|e| rank[e])
                .min()
                .unwrap_or(len);
            first[f] += c;
        }
        // none of the first l events occur iff the first occurrence is >= l.
        let mut out = vec![0u64; len + 1];
        let mut acc = 0;
        for l in (0..=len).rev() {
            acc += first[l];
            out[l] = acc;
        }
        out
    }

    /// The exclusive-dependency inequality on every prefix of `ordering`.
    pub fn lemma1(&self, ordering: &[usize]) -> Result<LemmaReport, OracleError> {
        self.check_ordering(ordering)?;
        let none = self.prefix_none_counts(ordering);
        let mut checks = Vec::with_capacity(ordering.len());
        for l in 0..ordering.len() {
            let e = ordering[l];
            let cond = self.frac(none[l]);
            let mut prod = BigRational::one();
            for &i in &ordering[..l] {
                if self.system.dependent(i, e) {
                    prod *= BigRational::one() - self.prob(i);
                }
            }
            if cond.is_zero() || prod.is_zero() {
                checks.push(LemmaCheck::vacuous(l + 1, 0));
                continue;
            }
            let lhs = self.frac(none[l + 1]) / &cond;
            let rhs = BigRational::one() - self.prob(e) / prod;
            checks.push(LemmaCheck::decided(l + 1, 0, &lhs, &rhs, &rhs));
        }
        Ok(LemmaReport::new(1, ordering, checks))
    }

    /// The union-closed inequality for the split point `k` (1-based; `k = 1` means no
    /// conditioning). The square roots are bracketed by exact rationals.
    pub fn lemma2(&self, ordering: &[usize], k: usize) -> Result<LemmaReport, OracleError> {
        self.check_ordering(ordering)?;
        let len = ordering.len();
        if k < 1 || k > len.max(1) {
            return Err(OracleError::BadK { k, len });
        }
        let none = self.prefix_none_counts(ordering);
        let cond = self.frac(none[k - 1]);
        if cond.is_zero() {
            return Ok(LemmaReport::new(2, ordering, vec![LemmaCheck::vacuous(len, k)]));
        }
        let lhs = self.frac(none[len]) / &cond;
        let comp = |e: usize| BigRational::one() - self.prob(e);
        let mut terms = Vec::new();
        for jpos in k - 1..len {
            let j = ordering[jpos];
            let mut q = BigRational::one();
            for &i in &ordering[..k - 1] {
                if self.system.dependent(i, j) {
                    q *= comp(i);
                }
            }
            let mut r = BigRational::one();
            for (ipos, &i) in ordering.iter().enumerate().skip(k - 1) {
                if ipos != jpos && self.system.dependent(i, j) {
                    r *= comp(i);
                }
            }
            if q.is_zero() || r.is_zero() {
                return Ok(LemmaReport::new(2, ordering, vec![LemmaCheck::vacuous(len, k)]));
            }
            terms.push((self.prob(j), q, r));
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = rhs_bracket(&terms, bits);
            if lhs <= lo || lhs > hi || bits >= 4096 {
                let check = LemmaCheck::decided(len, k, &lhs, &lo, &hi);
                return Ok(LemmaReport::new(2, ordering, vec![check]));
            }
            bits *= 2;
        }
    }
}

/// Bounds on `prod (1 - p / (q sqrt(r)))` using `bits` fractional bits for
/// each square root.
fn rhs_bracket(terms: &[(BigRational, BigRational, BigRational)], bits: u64) -> (BigRational, BigRational) {
    let mut lo = BigRational::one();
    let mut hi = BigRational::one();
    for (p, q, r) in terms {
        let (s_lo, s_hi) = sqrt_bracket(r, bits);
        let factor = |s: &BigRational| -> Option<BigRational> {
            if s.is_zero() {
                None
            } else {
                Some(BigRational::one() - p / (q * s))
            }
        };
        // The factor increases with s.
        let (f_lo, f_hi) = match (factor(&s_lo), factor(&s_hi)) {
            (Some(a), Some(b)) => (a, b),
            _ => return (BigRational::from_integer((-1_000_000_000i64).into()), BigRational::from_integer(1_000_000_000i64.into())),
        };
        let cands = [&lo * &f_lo, &lo * &f_hi, &hi * &f_lo, &hi * &f_hi];
        lo = cands.iter().min().expect("four candidates").clone();
        hi = cands.iter().max().expect("four candidates").clone();
    }
    (lo, hi)
}

fn sqrt_bracket(r: &BigRational, bits: u64) -> (BigRational, BigRational) {
    let num = r.numer().abs().to_biguint().expect("nonnegative");
    let den = r.denom().to_biguint().expect("positive");
    let scaled = (&num * &den) << (2 * bits);
    let root = scaled.sqrt();
    let scale = den << bits;
    (big_ratio(&root, &scale), big_ratio(&(root + 1u32), &scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    /// Number of events involved (`l`).
    pub l: usize,
    /// Split point for the union-closed check, 0 for the exclusive one.
    pub k: usize,
    pub lhs: f64,
    pub rhs_lower: f64,
    pub rhs_upper: f64,
    pub outcome: Outcome,
}

impl LemmaCheck {
    fn vacuous(l: usize, k: usize) -> Self {
        Self {
            l,
            k,
            lhs: f64::NAN,
            rhs_lower: f64::NAN,
            rhs_upper: f64::NAN,
            outcome: Outcome::Vacuous,
        }
    }

    fn decided(l: usize, k: usize, lhs: &BigRational, lo: &BigRational, hi: &BigRational) -> Self {
        let outcome = if lhs <= lo { Outcome::Pass } else { Outcome::Fail };
        Self {
            l,
            k,
            lhs: rational_to_f64(lhs),
            rhs_lower: rational_to_f64(lo),
            rhs_upper: rational_to_f64(hi),
            outcome,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: u8,
    pub ordering: Vec<usize>,
    pub checks: Vec<LemmaCheck>,
    pub passed: bool,
    pub vacuous: usize,
}

impl LemmaReport {
    fn new(lemma: u8, ordering: &[usize], checks: Vec<LemmaCheck>) -> Self {
        let passed = checks.iter().all(|c| c.outcome != Outcome::Fail);
        let vacuous = checks.iter().filter(|c| c.outcome == Outcome::Vacuous).count();
        Self {
            lemma,
            ordering: ordering.to_vec(),
            checks,
            passed,
            vacuous,
        }
    }
}

pub fn oracle_lemma1<G: Adjacency>(
    g: &G,
    root: Option<usize>,
    max_len: usize,
    ordering: &[usize],
    budget: u64,
) -> Result<LemmaReport, OracleError> {
    SelectionTable::build(g, build_event_system(g, root, max_len), budget)?.lemma1(ordering)
}

pub fn oracle_lemma2<G: Adjacency>(
    g: &G,
    root: Option<usize>,
    max_len: usize,
    ordering: &[usize],
    k: usize,
    budget: u64,
) -> Result<LemmaReport, OracleError> {
    SelectionTable::build(g, build_event_system(g, root, max_len), budget)?.lemma2(ordering, k)
}

/// Summary of many random orderings on one graph.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub events: usize,
    pub selections: u64,
    pub orderings: usize,
    pub lemma1_checks: usize,
    pub lemma2_checks: usize,
    pub vacuous: usize,
    pub failures: Vec<LemmaReport>,
    pub mutually_exclusive: bool,
    pub union_closed_independence: bool,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.mutually_exclusive && self.union_closed_independence
    }
}

/// Runs the exclusive-dependency check on every prefix and the union-closed
/// check at `k = 1` and one random split point, for `orderings` seeded random
/// event orders.
pub fn random_ordering_suite(table: &SelectionTable, orderings: usize, seed: u64) -> OracleSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = table.system.len();
    let mut order: Vec<usize> = (0..len).collect();
    let mut summary = OracleSummary {
        events: len,
        selections: table.total,
        orderings,
        lemma1_checks: 0,
        lemma2_checks: 0,
        vacuous: 0,
        failures: Vec::new(),
        mutually_exclusive: table.mutually_exclusive(),
        union_closed_independence: table.union_closed_independence(),
    };
    if len == 0 {
        return summary;
    }
    for _ in 0..orderings {
        order.shuffle(&mut rng);
        let mut reports = vec![table.lemma1(&order).expect("valid ordering")];
        summary.lemma1_checks += len;
        let mut ks = vec![1];
        if len >= 3 {
            ks.push(rng.gen_range(2..len));
        }
        for k in ks {
            reports.push(table.lemma2(&order, k).expect("valid k"));
            summary.lemma2_checks += 1;
        }
        for r in reports {
            summary.vacuous += r.vacuous;
            if !r.passed {
                summary.failures.push(r);
            }
        }
    }
    summary
}
