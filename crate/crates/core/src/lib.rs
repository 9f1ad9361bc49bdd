//! Linear optimization over the bounded-purity probability simplex
//!
//! The feasible set is
//!
//! ```text
//! P(t) = { p in R^n : p >= 0, sum(p) = 1, p.p <= t }
//! ```
//!
//! i.e. the probability simplex intersected with an l2-ball centred at the
//! origin. Two exact solvers for `max p.q` over `P(t)` are provided:
//!
//! - [`recursive::solve_recursive`]: pushes `q` onto simplex faces and drops
//!   coordinates that are provably zero at the optimum, `O(n^2)`.
//! - [`dual::solve_dual`]: minimizes the one-dimensional Lagrange dual
//!   `h(z)` by golden-section search and reconstructs the primal optimizer
//!   from the KKT conditions, `O(n)`.
//!
//! [`oracle::oracle_solve`] is an independent brute-force check used by the
//! test suites.
//!
//! On top of the vector problem sit the operator-level applications:
//! bounded-purity expectation values ([`operator`]), channel tools such as
//! noisy fidelity and purity-limited entanglement passing ([`channel`]), and
//! purity-constrained state tomography ([`tomography`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod dual;
mod error;
pub mod golden;
pub mod linalg;
mod math;
pub mod operator;
pub mod oracle;
pub mod random;
pub mod recursive;
pub mod simplex;
pub mod tomography;

pub use error::{Error, Result};
pub use simplex::{
    ObjectiveVector, ProbVector, PurityBudget, Regime, SolveResult, SolveStats, EPS_FEAS, EPS_NUM,
};

/// Which vector solver backs an operator-level computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Solver {
    Recursive,
    #[default]
    Dual,
    Oracle,
}

impl Solver {
    pub const ALL: [Solver; 3] = [Solver::Recursive, Solver::Dual, Solver::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Recursive => "recursive",
            Solver::Dual => "dual",
            Solver::Oracle => "oracle",
        }
    }

    /// Maximizes `p.q` over `P(t)` with this solver.
    ///
    /// `exact_purity` is honoured by the dual solver only; the other two
    /// solvers return whatever optimizer they find.
    pub fn solve(self, q: &ObjectiveVector, t: f64, exact_purity: bool) -> Result<SolveResult> {
        match self {
            Solver::Recursive => recursive::solve_recursive(q, t),
            Solver::Dual => dual::solve_dual(q, t, exact_purity),
            Solver::Oracle => oracle::oracle_solve(q, t),
        }
    }
}

impl core::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Solver::Recursive),
            "dual" => Ok(Solver::Dual),
            "oracle" => Ok(Solver::Oracle),
            _ => Err(Error::Validation("unknown solver name")),
        }
    }
}

impl core::fmt::Display for Solver {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}
