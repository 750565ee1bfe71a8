//! Exact spanning-tree counts.
//!
//! [`count_spanning_trees`] evaluates a Laplacian cofactor with fraction-free
//! (Bareiss) elimination over big integers. Two independent oracles back it
//! up in tests: [`count_by_deletion_contraction`] on a private multigraph and
//! [`count_by_enumeration`], which walks all outdegree-one selections and
//! counts the acyclic ones.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::families::{generate, FamilyError, FamilySpec};
use crate::graph::Adjacency;
use crate::util::{ln_big, serde_big};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("recursion budget of {0} calls exceeded")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

pub fn count_spanning_trees<G: Adjacency>(g: &G) -> Result<BigUint, CountError> {
    count_spanning_trees_cofactor(g, g.vertex_count().saturating_sub(1))
}

/// Determinant of the Laplacian with row and column `skip` removed.
pub fn count_spanning_trees_cofactor<G: Adjacency>(g: &G, skip: usize) -> Result<BigUint, CountError> {
    let n = g.vertex_count();
    if skip >= n {
        return Err(CountError::BadVertex(skip));
    }
    if !g.is_connected() {
        return Err(CountError::Disconnected);
    }
    if n == 1 {
        return Ok(BigUint::one());
    }
    let keep: Vec<usize> = (0..n).filter(|&v| v != skip).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in keep.iter().enumerate() {
        slot[v] = k;
    }
    let size = keep.len();
    let mut a = vec![vec![BigInt::zero(); size]; size];
    for (r, &v) in keep.iter().enumerate() {
        a[r][r] = BigInt::from(g.degree(v));
        for &w in g.neighbors(v) {
            if w != skip {
                a[r][slot[w]] -= 1;
            }
        }
    }
    let det = bareiss_determinant(a);
    match det.sign() {
        Sign::Minus => Ok(det.abs().to_biguint().expect("absolute value")),
        _ => Ok(det.to_biguint().expect("nonnegative")),
    }
}

/// Fraction-free Gaussian elimination; every division is exact.
pub(crate) fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Multigraph with a dense multiplicity matrix, used only by the
/// deletion–contraction oracle.
#[derive(Clone)]
struct Multigraph {
    mult: Vec<Vec<u32>>,
}

impl Multigraph {
    fn n(&self) -> usize {
        self.mult.len()
    }

    fn connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for w in 0..n {
                if self.mult[u][w] > 0 && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Merges `v` into `u`, dropping the loops created by the `u`-`v` edges.
    fn contract(&self, u: usize, v: usize) -> Multigraph {
        let n = self.n();
        let keep: Vec<usize> = (0..n).filter(|&x| x != v).collect();
        let mut mult = vec![vec![0; n - 1]; n - 1];
        for (a, &x) in keep.iter().enumerate() {
            for (b, &y) in keep.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mut m = self.mult[x][y];
                if x == u {
                    m += self.mult[v][y];
                }
                if y == u {
                    m += self.mult[x][v];
                }
                mult[a][b] = m;
            }
        }
        Multigraph { mult }
    }
}

pub fn count_by_deletion_contraction<G: Adjacency>(g: &G, budget: u64) -> Result<BigUint, CountError> {
    let n = g.vertex_count();
    if !g.is_connected() {
        return Err(CountError::Disconnected);
    }
    let mut mult = vec![vec![0u32; n]; n];
    for (u, v) in g.edges() {
        mult[u][v] = 1;
        mult[v][u] = 1;
    }
    let mut calls = 0u64;
    dc(Multigraph { mult }, &mut calls, budget)
}

fn dc(g: Multigraph, calls: &mut u64, budget: u64) -> Result<BigUint, CountError> {
    *calls += 1;
    if *calls > budget {
        return Err(CountError::BudgetExceeded(budget));
    }
    let n = g.n();
    if n == 1 {
        return Ok(BigUint::one());
    }
    if !g.connected() {
        return Ok(BigUint::zero());
    }
    if n == 2 {
        return Ok(BigUint::from(g.mult[0][1]));
    }
    // Branch on an edge at a vertex of least weighted degree.
    let u = (0..n)
        .min_by_key(|&x| g.mult[x].iter().sum::<u32>())
        .expect("nonempty");
    let v = (0..n).find(|&y| g.mult[u][y] > 0).expect("connected");
    let k = g.mult[u][v];
    let contracted = g.contract(u, v);
    let mut deleted = g;
    deleted.mult[u][v] = 0;
    deleted.mult[v][u] = 0;
    let with = dc(contracted, calls, budget)?;
    let without = dc(deleted, calls, budget)?;
    Ok(without + with * k)
}

/// Counts acyclic outdegree-one selections rooted at `root` by depth-first
/// search with incremental cycle pruning. Equals `t(G)` for connected `G`.
/// `budget` bounds the number of search nodes.
pub fn count_by_enumeration<G: Adjacency>(g: &G, root: usize, budget: u64) -> Result<BigUint, CountError> {
    let n = g.vertex_count();
    if root >= n {
        return Err(CountError::BadVertex(root));
    }
    if !g.is_connected() {
        return Err(CountError::Disconnected);
    }
    let order: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut out = vec![usize::MAX; n];
    let mut nodes = 0u64;
    let mut count = 0u64;
    enumerate(g, &order, 0, &mut out, &mut nodes, budget, &mut count)?;
    Ok(BigUint::from(count))
}

fn enumerate<G: Adjacency>(
    g: &G,
    order: &[usize],
    depth: usize,
    out: &mut [usize],
    nodes: &mut u64,
    budget: u64,
    count: &mut u64,
) -> Result<(), CountError> {
    if depth == order.len() {
        *count += 1;
        return Ok(());
    }
    *nodes += 1;
    if *nodes > budget {
        return Err(CountError::BudgetExceeded(budget));
    }
    let v = order[depth];
    for &w in g.neighbors(v) {
        out[v] = w;
        // Only a cycle through v can be new; follow the chosen out-edges.
        let mut x = w;
        let mut steps = 0;
        let closes = loop {
            if x == v {
                break true;
            }
            if out[x] == usize::MAX || steps > order.len() {
                break false;
            }
            x = out[x];
            steps += 1;
        };
        if !closes {
            enumerate(g, order, depth + 1, out, nodes, budget, count)?;
        }
    }
    out[v] = usize::MAX;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub label: String,
    pub n: usize,
    #[serde(with = "serde_big")]
    pub t: BigUint,
    /// `t(G)^(1/n)` in floating point.
    pub nth_root: f64,
}

pub fn growth_row<G: Adjacency>(label: String, g: &G) -> Result<GrowthRow, CountError> {
    let t = count_spanning_trees(g)?;
    let n = g.vertex_count();
    let nth_root = (ln_big(&t) / n as f64).exp();
    Ok(GrowthRow { label, n, t, nth_root })
}

pub fn growth_series(specs: &[FamilySpec]) -> Result<Vec<GrowthRow>, CountError> {
    specs
        .iter()
        .map(|spec| {
            let g = generate(spec)?;
            growth_row(spec.label(), &g)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{platonic, Solid};
    use crate::graph::SimpleGraph;

    #[test]
    fn small_closed_forms() {
        let tri = SimpleGraph::cycle(3);
        assert_eq!(count_spanning_trees(&tri).unwrap(), BigUint::from(3u32));
        let k4 = SimpleGraph::complete(4);
        assert_eq!(count_spanning_trees(&k4).unwrap(), BigUint::from(16u32));
        let c5 = SimpleGraph::cycle(5);
        assert_eq!(count_by_deletion_contraction(&c5, 1000).unwrap(), BigUint::from(5u32));
        assert_eq!(count_by_deletion_contraction(&k4, 1000).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn cayley_formula() {
        for n in 1..9usize {
            let k = SimpleGraph::complete(n);
            let expect = if n == 1 { 1 } else { n.pow(n as u32 - 2) };
            assert_eq!(count_spanning_trees(&k).unwrap(), BigUint::from(expect));
        }
    }

    #[test]
    fn cube_agrees_across_methods() {
        let cube = platonic(Solid::Cube);
        let t = count_spanning_trees(&cube).unwrap();
        assert_eq!(t, BigUint::from(384u32));
        assert_eq!(count_by_deletion_contraction(&cube, 1_000_000).unwrap(), t);
        assert_eq!(count_by_enumeration(&cube, 0, 1_000_000).unwrap(), t);
    }

    #[test]
    fn cofactor_choice_is_irrelevant() {
        let g = platonic(Solid::Octahedron);
        let base = count_spanning_trees_cofactor(&g, 0).unwrap();
        for skip in 1..g.n() {
            assert_eq!(count_spanning_trees_cofactor(&g, skip).unwrap(), base);
        }
    }

    #[test]
    fn errors() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_spanning_trees(&g), Err(CountError::Disconnected));
        let k5 = SimpleGraph::complete(5);
        assert_eq!(count_by_deletion_contraction(&k5, 3), Err(CountError::BudgetExceeded(3)));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let m = |rows: &[[i64; 3]]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        assert_eq!(bareiss_determinant(m(&[[0, 1, 2], [1, 0, 3], [4, -3, 8]])), BigInt::from(-2));
        assert_eq!(bareiss_determinant(m(&[[1, 2, 3], [2, 4, 6], [1, 0, 1]])), BigInt::zero());
    }
}
