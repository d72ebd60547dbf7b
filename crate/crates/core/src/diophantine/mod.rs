//! Minimal nonnegative integer solutions of linear Diophantine systems.
//!
//! Solutions are computed by a completion search on the homogenized system
//! `A·x - r·z = 0`, `z ≤ 1`: its minimal solutions with `z = 0` form the
//! Hilbert basis of `A·x = 0`, and those with `z = 1` are the minimal
//! solutions of `A·x = r`.

mod completion;
mod lattice;
mod matrix;

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};

pub use lattice::{bruteforce_min_solutions, kernel_basis, rank, rank_of_rows, row_space_basis};
pub use matrix::IntMatrix;

/// Outcome of a budgeted computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bounded<T> {
    Done(T),
    Budget,
}

impl<T> Bounded<T> {
    pub fn done(self) -> Option<T> {
        match self {
            Bounded::Done(t) => Some(t),
            Bounded::Budget => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Bounded<U> {
        match self {
            Bounded::Done(t) => Bounded::Done(f(t)),
            Bounded::Budget => Bounded::Budget,
        }
    }
}

/// `A·x = rhs`, `x ≥ lower`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub a: IntMatrix,
    pub rhs: Vec<i64>,
    pub lower: Vec<i64>,
}

impl LinearSystem {
    pub fn new(a: IntMatrix, rhs: Vec<i64>) -> Self {
        assert_eq!(a.rows(), rhs.len(), "rhs length");
        let lower = vec![0; a.cols()];
        LinearSystem { a, rhs, lower }
    }

    pub fn homogeneous(a: IntMatrix) -> Self {
        let rhs = vec![0; a.rows()];
        Self::new(a, rhs)
    }

    pub fn with_lower(mut self, lower: Vec<i64>) -> Self {
        assert_eq!(lower.len(), self.a.cols(), "lower bound length");
        assert!(lower.iter().all(|&l| l >= 0), "lower bounds are nonnegative");
        self.lower = lower;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn is_solution(&self, x: &[i64]) -> bool {
        x.len() == self.a.cols()
            && x.iter().zip(&self.lower).all(|(v, l)| v >= l)
            && self.a.mul_vec(x) == self.rhs
    }
}

/// The minimal solutions of a system together with the Hilbert basis of
/// its homogeneous part. Every solution is a minimal one plus a
/// nonnegative combination of basis elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub minimal: Vec<Vec<i64>>,
    pub basis: Vec<Vec<i64>>,
    pub nodes: usize,
}

impl SolutionSet {
    pub fn is_satisfiable(&self) -> bool {
        !self.minimal.is_empty()
    }
}

/// Node cap for the completion search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophantineBudget {
    pub max_nodes: usize,
}

impl Default for DiophantineBudget {
    fn default() -> Self {
        DiophantineBudget { max_nodes: 400_000 }
    }
}

/// The set of pairwise incomparable nonzero minimal solutions of `A·x = 0`.
pub type HilbertBasis = Vec<Vec<i64>>;

pub fn solve(sys: &LinearSystem, budget: DiophantineBudget) -> Bounded<SolutionSet> {
    let k = sys.a.cols();
    let rows = sys.a.row_vecs();
    // x = x'' + lower
    let shift = sys.a.mul_vec(&sys.lower);
    let r: Vec<i64> = sys.rhs.iter().zip(&shift).map(|(a, b)| a - b).collect();
    let Some(done) = completion::complete(&rows, &r, k, budget.max_nodes) else {
        return Bounded::Budget;
    };
    let minimal = done
        .particular
        .into_iter()
        .map(|m| m.iter().zip(&sys.lower).map(|(a, b)| a + b).collect())
        .collect();
    Bounded::Done(SolutionSet {
        minimal,
        basis: done.homogeneous,
        nodes: done.nodes,
    })
}

/// Hilbert basis of `A·x = 0`. Every element is checked against the
/// Pottier bound `‖n‖₁ ≤ (1 + k·‖A‖∞)^rank(A)`.
pub fn hilbert_basis(a: &IntMatrix, budget: DiophantineBudget) -> Bounded<HilbertBasis> {
    let out = solve(&LinearSystem::homogeneous(a.clone()), budget).map(|s| s.basis);
    if let Bounded::Done(basis) = &out {
        let bound = pottier_bound(a);
        for n in basis {
            assert!(
                BigUint::from(norm1(n)) <= bound,
                "basis element {n:?} exceeds the Pottier bound {bound}"
            );
        }
    }
    out
}

/// Minimal solutions of `A·x = r`, each checked against
/// `‖m‖₁ ≤ (1 + k·‖A‖∞ + ‖r‖∞)^(rank(A)+1)`.
pub fn minimal_solutions(
    a: &IntMatrix,
    r: &[i64],
    budget: DiophantineBudget,
) -> Bounded<Vec<Vec<i64>>> {
    let out = solve(&LinearSystem::new(a.clone(), r.to_vec()), budget).map(|s| s.minimal);
    if let Bounded::Done(sols) = &out {
        let bound = minimal_solution_bound(a, r);
        for m in sols {
            assert!(
                BigUint::from(norm1(m)) <= bound,
                "minimal solution {m:?} exceeds the bound {bound}"
            );
        }
    }
    out
}

pub fn norm1(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).sum()
}

/// `(1 + k·‖A‖∞)^rank(A)`.
pub fn pottier_bound(a: &IntMatrix) -> BigUint {
    let base = BigUint::from(1 + a.cols() as u64 * a.max_abs() as u64);
    Pow::pow(base, rank(a) as u32)
}

/// `(1 + k·‖A‖∞ + ‖r‖∞)^(rank(A)+1)`.
pub fn minimal_solution_bound(a: &IntMatrix, r: &[i64]) -> BigUint {
    let rmax = r.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
    let base = BigUint::from(1 + a.cols() as u64 * a.max_abs() as u64 + rmax);
    Pow::pow(base, rank(a) as u32 + 1)
}

/// Whether `u ≤ v` entrywise.
pub fn leq(u: &[i64], v: &[i64]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hb(rows: &[&[i64]]) -> HilbertBasis {
        hilbert_basis(&IntMatrix::from_rows(rows), DiophantineBudget::default())
            .done()
            .unwrap()
    }

    fn ms(rows: &[&[i64]], r: &[i64]) -> Vec<Vec<i64>> {
        minimal_solutions(&IntMatrix::from_rows(rows), r, DiophantineBudget::default())
            .done()
            .unwrap()
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hb(&[&[1, -1]]), vec![vec![1, 1]]);
        assert_eq!(hb(&[&[2, -3]]), vec![vec![3, 2]]);
        assert_eq!(hb(&[&[0]]), vec![vec![1]]);
        assert_eq!(
            hb(&[&[1, 1, -2]]),
            vec![vec![0, 2, 1], vec![1, 1, 1], vec![2, 0, 1]]
        );
    }

    #[test]
    fn minimal_solution_examples() {
        assert_eq!(ms(&[&[1]], &[3]), vec![vec![3]]);
        assert_eq!(ms(&[&[1, 1]], &[2]), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(ms(&[&[1, -1]], &[1]), vec![vec![1, 0]]);
        assert!(ms(&[&[2, 2]], &[3]).is_empty());
        assert_eq!(ms(&[&[1, -1]], &[0]), vec![vec![0, 0]]);
    }

    #[test]
    fn lower_bounds_shift_minimal_solutions() {
        let sys = LinearSystem::new(IntMatrix::from_rows(&[[1, -1]]), vec![0]).with_lower(vec![1, 0]);
        let s = solve(&sys, DiophantineBudget::default()).done().unwrap();
        assert_eq!(s.minimal, vec![vec![1, 1]]);
        assert_eq!(s.basis, vec![vec![1, 1]]);
    }

    #[test]
    fn budget_is_reported() {
        let a = IntMatrix::from_rows(&[[3, 5, -7, -11]]);
        assert_eq!(
            hilbert_basis(&a, DiophantineBudget { max_nodes: 3 }),
            Bounded::Budget
        );
    }

    #[test]
    fn agrees_with_oracle_on_fixed_systems() {
        let systems: Vec<IntMatrix> = vec![
            IntMatrix::from_rows(&[[1, 2, -3, 0], [0, 1, 1, -2]]),
            IntMatrix::from_rows(&[[3, -2, 1, -1]]),
            IntMatrix::from_rows(&[[1, -1, 0, 0], [0, 0, 2, -2], [1, 0, -1, 0]]),
            IntMatrix::from_rows(&[[-3, 3, 2, -1], [1, -2, 0, 3]]),
        ];
        for a in systems {
            let got = hilbert_basis(&a, DiophantineBudget::default()).done().unwrap();
            let cap: u64 = pottier_bound(&a).try_into().unwrap();
            let want = bruteforce_min_solutions(&a, &vec![0; a.rows()], cap);
            assert_eq!(got, want, "matrix\n{a}");
        }
    }
}
