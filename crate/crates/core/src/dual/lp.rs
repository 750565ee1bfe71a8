//! Exact rational simplex for small dual programs.
//!
//! A [`DualLp`] asks for `min cost . lambda` subject to `row . lambda >= rhs`
//! with each `lambda_k` free or nonnegative. It has few variables and many
//! rows, so it is solved through its primal
//!
//! ```text
//! max sum_r rhs_r f_r   s.t.  sum_r row_r[k] f_r  (= or <=)  cost_k,  f >= 0
//! ```
//!
//! whose tableau has one row per `lambda_k`. The dual values of that
//! tableau are the `lambda`. Two phases, Bland's rule, no floating point.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    Free,
    NonNeg,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("infeasible")]
    Infeasible,
    #[error("unbounded")]
    Unbounded,
    #[error("not solved within {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone)]
pub struct DualLp {
    pub signs: Vec<VarSign>,
    pub cost: Vec<BigRational>,
    /// `(coefficients, rhs)` meaning `coefficients . lambda >= rhs`.
    pub rows: Vec<(Vec<BigRational>, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub lambda: Vec<BigRational>,
    pub objective: BigRational,
    /// Primal weight of each row; positive weights mark binding rows.
    pub weights: Vec<BigRational>,
    pub pivots: usize,
}

const PIVOT_LIMIT: usize = 200_000;

struct Tableau {
    t: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for x in self.t[row].iter_mut() {
            *x = &*x / &p;
        }
        self.b[row] = &self.b[row] / &p;
        for r in 0..self.t.len() {
            if r == row || self.t[r][col].is_zero() {
                continue;
            }
            let f = self.t[r][col].clone();
            for c in 0..self.t[r].len() {
                if !self.t[row][c].is_zero() {
                    let d = &f * &self.t[row][c];
                    self.t[r][c] -= d;
                }
            }
            let d = &f * &self.b[row];
            self.b[r] -= d;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Maximises `costs . x` over columns `allowed`, from the current basis.
    fn optimise(&mut self, costs: &[BigRational], allowed: usize) -> Result<(), LpError> {
        loop {
            if self.pivots > PIVOT_LIMIT {
                return Err(LpError::IterationLimit(PIVOT_LIMIT));
            }
            let cb: Vec<&BigRational> = self.basis.iter().map(|&j| &costs[j]).collect();
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut rc = costs[j].clone();
                for (r, c) in cb.iter().enumerate() {
                    if !self.t[r][j].is_zero() {
                        rc -= *c * &self.t[r][j];
                    }
                }
                rc.is_positive()
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for r in 0..self.t.len() {
                if self.t[r][col].is_positive() {
                    let ratio = &self.b[r] / &self.t[r][col];
                    let better = match &leave {
                        None => true,
                        Some((lr, lv)) => ratio < *lv || (ratio == *lv && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
    }
}

/// Solves the dual program exactly. Errors describe the dual: `Infeasible`
/// when no `lambda` satisfies the rows, `Unbounded` when the objective
/// decreases without limit.
pub fn solve_dual_lp(lp: &DualLp) -> Result<LpSolution, LpError> {
    let k = lp.signs.len();
    let nrows = lp.rows.len();
    let slack_of: Vec<Option<usize>> = {
        let mut next = nrows;
        lp.signs
            .iter()
            .map(|s| match s {
                VarSign::NonNeg => {
                    next += 1;
                    Some(next - 1)
                }
                VarSign::Free => None,
            })
            .collect()
    };
    let nslack = slack_of.iter().flatten().count();
    let art0 = nrows + nslack;
    let ncols = art0 + k;
    let mut t = vec![vec![BigRational::zero(); ncols]; k];
    let mut b = vec![BigRational::zero(); k];
    let mut sign = vec![BigRational::one(); k];
    for v in 0..k {
        if lp.cost[v].is_negative() {
            sign[v] = -BigRational::one();
        }
        for (r, (coef, _)) in lp.rows.iter().enumerate() {
            t[v][r] = &coef[v] * &sign[v];
        }
        if let Some(s) = slack_of[v] {
            t[v][s] = sign[v].clone();
        }
        t[v][art0 + v] = BigRational::one();
        b[v] = &lp.cost[v] * &sign[v];
    }
    let mut tab = Tableau {
        t,
        b,
        basis: (art0..ncols).collect(),
        pivots: 0,
    };

    // Phase 1: drive the artificials to zero.
    let mut phase1 = vec![BigRational::zero(); ncols];
    for c in phase1.iter_mut().skip(art0) {
        *c = -BigRational::one();
    }
    tab.optimise(&phase1, art0)?;
    if tab.basis.iter().zip(&tab.b).any(|(&j, v)| j >= art0 && v.is_positive()) {
        return Err(LpError::Unbounded);
    }
    for r in 0..k {
        if tab.basis[r] >= art0 {
            if let Some(col) = (0..art0).find(|&c| !tab.t[r][c].is_zero() && !tab.basis.contains(&c)) {
                tab.pivot(r, col);
            }
        }
    }

    // Phase 2.
    let mut costs = vec![BigRational::zero(); ncols];
    for (r, (_, rhs)) in lp.rows.iter().enumerate() {
        costs[r] = rhs.clone();
    }
    tab.optimise(&costs, art0).map_err(|e| match e {
        LpError::Unbounded => LpError::Infeasible,
        other => other,
    })?;

    let cb: Vec<&BigRational> = tab.basis.iter().map(|&j| &costs[j]).collect();
    let lambda: Vec<BigRational> = (0..k)
        .map(|v| {
            let y: BigRational = (0..k).map(|r| cb[r] * &tab.t[r][art0 + v]).sum();
            y * &sign[v]
        })
        .collect();
    let mut weights = vec![BigRational::zero(); nrows];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < nrows {
            weights[j] = tab.b[r].clone();
        }
    }
    let objective = lambda.iter().zip(&lp.cost).map(|(l, c)| l * c).sum();
    Ok(LpSolution {
        lambda,
        objective,
        weights,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::ratio;

    fn r(n: i64) -> BigRational {
        ratio(n, 1)
    }

    #[test]
    fn one_variable_closed_form() {
        // min x s.t. x >= 3/7, x >= -2, x >= 0.
        let lp = DualLp {
            signs: vec![VarSign::NonNeg],
            cost: vec![r(1)],
            rows: vec![(vec![r(1)], ratio(3, 7)), (vec![r(1)], r(-2))],
        };
        let s = solve_dual_lp(&lp).unwrap();
        assert_eq!(s.lambda, vec![ratio(3, 7)]);
        assert_eq!(s.objective, ratio(3, 7));
        assert_eq!(s.weights, vec![r(1), r(0)]);
    }

    #[test]
    fn two_variables_with_free_one() {
        // min x + 2y s.t. x + y >= 1, x - y >= -1, y >= 0, x free:
        // optimum at y = 0, x = 1.
        let lp = DualLp {
            signs: vec![VarSign::Free, VarSign::NonNeg],
            cost: vec![r(1), r(2)],
            rows: vec![(vec![r(1), r(1)], r(1)), (vec![r(1), r(-1)], r(-1))],
        };
        let s = solve_dual_lp(&lp).unwrap();
        assert_eq!(s.lambda, vec![r(1), r(0)]);
        assert_eq!(s.objective, r(1));
    }

    #[test]
    fn negative_costs_and_degeneracy() {
        // min -x s.t. -x >= -5, -x >= -5, x free -> x = 5.
        let lp = DualLp {
            signs: vec![VarSign::Free],
            cost: vec![r(-1)],
            rows: vec![(vec![r(-1)], r(-5)), (vec![r(-1)], r(-5))],
        };
        let s = solve_dual_lp(&lp).unwrap();
        assert_eq!(s.lambda, vec![r(5)]);
        assert_eq!(s.objective, r(-5));
    }

    #[test]
    fn unbounded_and_infeasible() {
        // min x, x free, x >= 1: bounded; without rows: unbounded.
        let free = DualLp {
            signs: vec![VarSign::Free],
            cost: vec![r(1)],
            rows: vec![],
        };
        assert_eq!(solve_dual_lp(&free).unwrap_err(), LpError::Unbounded);
        // x >= 1 and -x >= 0 cannot both hold.
        let bad = DualLp {
            signs: vec![VarSign::Free],
            cost: vec![r(1)],
            rows: vec![(vec![r(1)], r(1)), (vec![r(-1)], r(0))],
        };
        assert_eq!(solve_dual_lp(&bad).unwrap_err(), LpError::Infeasible);
    }
}
