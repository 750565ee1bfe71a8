//! Exact re-solving of finite restrictions of a dual program.
//!
//! Log terms are rationalised to [`RATIONAL_SCALE`] (`round(g 10^15) /
//! 10^15`); the `lambda` coefficients are exact. Constraints are added by
//! column generation: the oracle maximises each group of the pool at the
//! current point and returns violated maximisers. The optimum is generally
//! not unique in `lambda`; [`TieBreak`] stages select a point of the optimal
//! face. Finally `lambda3` is raised by a small bump that absorbs the
//! rationalisation error.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::cases::CaseSpace;
use super::lp::{solve_dual_lp, DualLp, LpError, LpSolution, VarSign};
use super::sides::group_max;
use super::{constraint_terms, CaseSignature, ConstraintTerms, DualCertificate, DualError, DualProgram};
use crate::bound::MuVector;
use crate::util::{ratio, rational_to_f64};

/// Denominator used to rationalise logarithmic terms.
pub const RATIONAL_SCALE: i64 = 1_000_000_000_000_000;

/// Signature pool of a restricted program.
#[derive(Debug, Clone, PartialEq)]
pub enum Pool {
    /// The shipped brute-force tables.
    Table,
    /// All degrees up to `max_degree`, entries up to `max_entry`.
    Box { max_degree: u32, max_entry: u32 },
    Explicit(Vec<CaseSignature>),
}

impl Pool {
    pub fn default_for(program: DualProgram) -> Self {
        match program {
            DualProgram::Gen2 | DualProgram::Gen3 => Pool::Table,
            DualProgram::R4 | DualProgram::R5 => Pool::Box {
                max_degree: 12,
                max_entry: 12,
            },
        }
    }

    fn describe(&self) -> String {
        match self {
            Pool::Table => "table".into(),
            Pool::Box { max_degree, max_entry } => format!("box(degree<={max_degree}, entry<={max_entry})"),
            Pool::Explicit(v) => format!("explicit({} signatures)", v.len()),
        }
    }
}

/// A secondary objective over `lambda1..lambda4` (0-based index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TieBreak {
    MinAbs(usize),
    Min(usize),
}

impl TieBreak {
    /// General problem: `lambda1` as small as possible, then the smallest
    /// `lambda3`. Restricted problems: `lambda1`, then `lambda2`, as small
    /// as possible in absolute value.
    pub fn default_for(program: DualProgram) -> Vec<TieBreak> {
        match program {
            DualProgram::Gen2 | DualProgram::Gen3 => vec![TieBreak::MinAbs(0), TieBreak::Min(2)],
            DualProgram::R4 | DualProgram::R5 => vec![TieBreak::MinAbs(0), TieBreak::MinAbs(1)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub pool: Pool,
    /// Which of `lambda1..lambda4` are optimised; the others stay 0.
    pub optimise: [bool; 4],
    /// Secondary objectives applied in turn on the optimal face.
    pub tie_break: Vec<TieBreak>,
    /// Added to `lambda3` after solving.
    pub bump: f64,
    /// A constraint counts as violated above this value.
    pub tolerance: f64,
    pub max_rounds: usize,
    /// `|lambda_k|` is capped here; an optimum on the cap means the
    /// restricted program is unbounded.
    pub lambda_cap: i64,
}

impl SolveOptions {
    pub fn for_program(program: DualProgram) -> Self {
        Self {
            pool: Pool::default_for(program),
            optimise: [true, true, true, program.uses_lambda4()],
            tie_break: TieBreak::default_for(program),
            bump: 1e-8,
            tolerance: 1e-12,
            max_rounds: 500,
            lambda_cap: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub certificate: DualCertificate,
    /// Objective of the returned (bumped) certificate.
    pub objective: f64,
    /// Exact optimum of the rationalised restricted program.
    pub exact_objective: String,
    pub pool: String,
    pub rounds: usize,
    pub constraints: usize,
    /// Signatures carrying positive primal weight at the optimum.
    pub binding: Vec<String>,
    pub rationalisation: String,
    pub bump: f64,
}

struct Row {
    sig: CaseSignature,
    terms: ConstraintTerms,
    rhs: BigRational,
}

fn rationalise(x: f64) -> BigRational {
    let n = (x * RATIONAL_SCALE as f64).round();
    BigRational::new(BigInt::from(n as i64), BigInt::from(RATIONAL_SCALE))
}

fn to_f64_lambda(vars: &[usize], values: &[BigRational]) -> [f64; 4] {
    let mut l = [0.0; 4];
    for (slot, &v) in vars.iter().enumerate() {
        l[v] = rational_to_f64(&values[slot]);
    }
    l
}

/// Supplies the most violated constraints of the pool at a point.
enum Oracle {
    Space(CaseSpace),
    Explicit(Vec<CaseSignature>),
}

impl Oracle {
    fn violated(&self, cert: &DualCertificate, tol: f64) -> Result<Vec<CaseSignature>, DualError> {
        match self {
            Oracle::Space(space) => Ok(space
                .groups
                .par_iter()
                .map(|g| group_max(cert, g))
                .collect::<Vec<_>>()
                .into_iter()
                .filter(|m| m.lhs > tol)
                .map(|m| m.argmax)
                .collect()),
            Oracle::Explicit(sigs) => {
                let mut out = Vec::new();
                for s in sigs {
                    if super::dual_lhs(cert, s)? > tol {
                        out.push(s.clone());
                    }
                }
                Ok(out)
            }
        }
    }
}

struct Problem<'a> {
    program: DualProgram,
    mu: MuVector,
    vars: Vec<usize>,
    options: &'a SolveOptions,
    rows: Vec<Row>,
    seen: HashSet<CaseSignature>,
    oracle: Oracle,
    rounds: usize,
}

/// Extra rows and variables of a tie-break stage, expressed over the
/// optimised `lambda` followed by one auxiliary variable `t`.
struct Stage {
    cost: Vec<BigRational>,
    with_t: bool,
    extra: Vec<(Vec<BigRational>, BigRational)>,
}

impl Problem<'_> {
    fn add(&mut self, sig: CaseSignature) -> Result<(), DualError> {
        if self.seen.contains(&sig) {
            return Ok(());
        }
        let terms = constraint_terms(self.program, &self.mu, &sig)?;
        let rhs = rationalise(terms.g);
        self.seen.insert(sig.clone());
        self.rows.push(Row { sig, terms, rhs });
        Ok(())
    }

    fn coefficients(&self, row: &Row) -> Vec<BigRational> {
        self.vars
            .iter()
            .map(|&v| match v {
                0 => row.terms.a1.clone(),
                1 => row.terms.a2.clone(),
                2 => BigRational::one(),
                _ => BigRational::from_integer(BigInt::from(row.terms.e)),
            })
            .collect()
    }

    fn lp(&self, stage: &Stage) -> DualLp {
        let n = self.vars.len();
        let width = n + usize::from(stage.with_t);
        let pad = |mut v: Vec<BigRational>| {
            v.resize(width, BigRational::zero());
            v
        };
        let mut signs: Vec<VarSign> = self
            .vars
            .iter()
            .map(|&v| if v == 2 { VarSign::NonNeg } else { VarSign::Free })
            .collect();
        if stage.with_t {
            signs.push(VarSign::NonNeg);
        }
        let mut rows: Vec<(Vec<BigRational>, BigRational)> =
            self.rows.iter().map(|r| (pad(self.coefficients(r)), r.rhs.clone())).collect();
        let cap = ratio(self.options.lambda_cap, 1);
        for slot in 0..n {
            let mut up = vec![BigRational::zero(); width];
            up[slot] = -BigRational::one();
            rows.push((up, -cap.clone()));
            if signs[slot] == VarSign::Free {
                let mut down = vec![BigRational::zero(); width];
                down[slot] = BigRational::one();
                rows.push((down, -cap.clone()));
            }
        }
        rows.extend(stage.extra.iter().map(|(c, r)| (pad(c.clone()), r.clone())));
        DualLp {
            signs,
            cost: pad(stage.cost.clone()),
            rows,
        }
    }

    /// Solves one stage to convergence of the column generation.
    fn run(&mut self, stage: &Stage) -> Result<LpSolution, DualError> {
        loop {
            self.rounds += 1;
            if self.rounds > self.options.max_rounds {
                return Err(DualError::Lp(LpError::IterationLimit(self.options.max_rounds)));
            }
            let sol = solve_dual_lp(&self.lp(stage))?;
            let lambda = to_f64_lambda(&self.vars, &sol.lambda);
            let cert = DualCertificate::new(self.program, self.mu, lambda);
            let violated = self.oracle.violated(&cert, self.options.tolerance)?;
            let before = self.rows.len();
            for s in violated {
                self.add(s)?;
            }
            if self.rows.len() == before {
                let cap = ratio(self.options.lambda_cap, 1);
                if sol.lambda[..self.vars.len()].iter().any(|l| l.abs() >= cap) {
                    return Err(DualError::Lp(LpError::Unbounded));
                }
                return Ok(sol);
            }
        }
    }
}

/// Solves the restricted dual of `program` for fixed `mu`.
pub fn solve_finite_dual(program: DualProgram, mu: MuVector, options: &SolveOptions) -> Result<SolveReport, DualError> {
    let vars: Vec<usize> = (0..4).filter(|&v| options.optimise[v]).collect();
    if !vars.contains(&2) {
        return Err(DualError::Certificate("lambda3 must be optimised".into()));
    }
    let oracle = match &options.pool {
        Pool::Table => Oracle::Space(CaseSpace::table(program)),
        Pool::Box { max_degree, max_entry } => Oracle::Space(CaseSpace::boxed(program, *max_degree, *max_entry)),
        Pool::Explicit(v) => Oracle::Explicit(v.clone()),
    };
    let mut p = Problem {
        program,
        mu,
        vars: vars.clone(),
        options,
        rows: Vec::new(),
        seen: HashSet::new(),
        oracle,
        rounds: 0,
    };
    // Seed with every group maximiser at lambda = 0.
    let zero = DualCertificate::new(program, mu, [0.0; 4]);
    for s in p.oracle.violated(&zero, f64::NEG_INFINITY)? {
        p.add(s)?;
    }

    let cost: Vec<BigRational> = vars
        .iter()
        .map(|&v| match v {
            2 => program.m_ratio(),
            3 => BigRational::zero(),
            _ => BigRational::one(),
        })
        .collect();
    let n = vars.len();
    let first = p.run(&Stage {
        cost: cost.clone(),
        with_t: false,
        extra: Vec::new(),
    })?;
    let z_star = first.objective.clone();
    let binding: Vec<String> = p
        .rows
        .iter()
        .zip(&first.weights)
        .filter(|(_, w)| w.is_positive())
        .map(|(r, _)| r.sig.to_string())
        .collect();

    let mut solution = first.lambda[..n].to_vec();
    // Rows pinning the optimal face, over (lambda, t): cost . lambda <= Z*.
    let mut pins: Vec<(Vec<BigRational>, BigRational)> = vec![(
        {
            let mut c: Vec<BigRational> = cost.iter().map(|x| -x).collect();
            c.push(BigRational::zero());
            c
        },
        -z_star.clone(),
    )];
    let unit = |slot: usize, v: i64| {
        let mut c = vec![BigRational::zero(); n + 1];
        c[slot] = ratio(v, 1);
        c
    };
    for tb in &options.tie_break {
        let (TieBreak::MinAbs(target) | TieBreak::Min(target)) = *tb;
        let Some(slot) = vars.iter().position(|&v| v == target) else {
            continue;
        };
        let mut extra = pins.clone();
        let stage_cost = match tb {
            TieBreak::MinAbs(_) => {
                // t >= lambda and t >= -lambda.
                for sign in [1, -1] {
                    let mut c = unit(slot, sign);
                    c[n] = BigRational::one();
                    extra.push((c, BigRational::zero()));
                }
                unit(n, 1)
            }
            TieBreak::Min(_) => unit(slot, 1),
        };
        let sol = p.run(&Stage {
            cost: stage_cost,
            with_t: true,
            extra,
        })?;
        match tb {
            TieBreak::MinAbs(_) => {
                let t = sol.lambda[n].clone();
                pins.push((unit(slot, -1), -t.clone()));
                pins.push((unit(slot, 1), -t));
            }
            TieBreak::Min(_) => pins.push((unit(slot, -1), -sol.lambda[slot].clone())),
        }
        solution = sol.lambda[..n].to_vec();
    }

    let mut lambda = to_f64_lambda(&vars, &solution);
    lambda[2] += options.bump;
    let certificate = DualCertificate::new(program, mu, lambda);
    Ok(SolveReport {
        objective: super::objective(&certificate),
        certificate,
        exact_objective: z_star.to_string(),
        pool: options.pool.describe(),
        rounds: p.rounds,
        constraints: p.rows.len(),
        binding,
        rationalisation: format!("log terms rounded to multiples of 1/{RATIONAL_SCALE}"),
        bump: options.bump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{dual_lhs, edge_sig};

    #[test]
    fn single_constraint_closed_form() {
        let sig = edge_sig(4, 4, vec![4; 3], vec![4; 3]);
        let mut opts = SolveOptions::for_program(DualProgram::R4);
        opts.pool = Pool::Explicit(vec![sig.clone()]);
        opts.optimise = [false, false, true, false];
        opts.bump = 0.0;
        let mu = MuVector::NO_TRIANGLES;
        let r = solve_finite_dual(DualProgram::R4, mu, &opts).unwrap();
        // Only lambda3 moves, so lambda3 = max(g, 0).
        let g = dual_lhs(&DualCertificate::new(DualProgram::R4, mu, [0.0; 4]), &sig).unwrap();
        assert!((r.certificate.lambda[2] - g.max(0.0)).abs() < 1e-14);
        assert_eq!(r.binding.len(), 1);
    }

    #[test]
    fn rationalisation_is_within_half_unit() {
        let x = std::f64::consts::PI;
        let q = rationalise(x);
        assert!((rational_to_f64(&q) - x).abs() <= 0.5e-15 + 1e-16);
    }

    #[test]
    fn free_lambdas_without_enough_rows_are_unbounded() {
        let sig = edge_sig(4, 4, vec![4; 3], vec![4; 3]);
        let mut opts = SolveOptions::for_program(DualProgram::R4);
        opts.pool = Pool::Explicit(vec![sig]);
        let err = solve_finite_dual(DualProgram::R4, MuVector::NO_TRIANGLES, &opts).unwrap_err();
        assert_eq!(err, DualError::Lp(LpError::Unbounded));
    }
}
