//! Feasible sets, objective normalization, regime classification and the
//! closed-form solutions shared by every solver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::math::{argmax, argmin, dot, sqrt};
use crate::recursive::RecursionTrace;

/// Tolerance for feasibility and tie tests.
pub const EPS_FEAS: f64 = 1e-9;
/// Tolerance for algebraic identity checks.
pub const EPS_NUM: f64 = 1e-10;

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Validates nonnegativity and unit sum within [`EPS_FEAS`].
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("probability vector must be non-empty and finite"));
        }
        let sum: f64 = entries.iter().sum();
        let min = entries.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EPS_FEAS || (sum - 1.0).abs() > EPS_FEAS {
            return Err(Error::Validation("entries must be nonnegative and sum to one"));
        }
        Ok(Self(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// The vertex `e(i)`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn purity(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Objective coefficients `q`. Entries are finite; no sign or sum constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidObjective);
        }
        Ok(Self(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Upper bound `t` on `p.p` in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityBudget {
    t: f64,
    n: usize,
}

impl PurityBudget {
    /// Values within [`EPS_FEAS`] of `1/n` snap to `1/n`.
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("dimension must be positive"));
        }
        if !t.is_finite() {
            return Err(Error::Validation("purity bound must be finite"));
        }
        Ok(Self { t: clamp_purity(n, t), n })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn min_purity(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn is_feasible(&self) -> bool {
        self.t >= self.min_purity()
    }

    /// Radius `sqrt(t - 1/n)` of the ball slice around the simplex centre.
    pub fn delta(&self) -> f64 {
        sqrt((self.t - self.min_purity()).max(0.0))
    }
}

pub(crate) fn clamp_purity(n: usize, t: f64) -> f64 {
    let inv = 1.0 / n as f64;
    if (t - inv).abs() <= EPS_FEAS {
        inv
    } else {
        t
    }
}

/// Which closed-form case, if any, applies to an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `t >= 1`: the purity constraint is inactive.
    FullSimplex,
    /// `t < 1/n`: empty feasible set.
    Infeasible,
    /// `t = 1/n`: only the uniform vector is feasible.
    Singleton,
    /// `n = 2`.
    TwoDim,
    /// Normalized objective is uniform; every feasible point is optimal.
    UniformObjective,
    /// `1/n < t <= 1/(n-1)`: the ball slice lies inside the simplex.
    BallEqualsSimplexSlice,
    General,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FullSimplex => "full_simplex",
            Regime::Infeasible => "infeasible",
            Regime::Singleton => "singleton",
            Regime::TwoDim => "two_dim",
            Regime::UniformObjective => "uniform_objective",
            Regime::BallEqualsSimplexSlice => "ball_equals_simplex_slice",
            Regime::General => "general",
        }
    }
}

impl core::fmt::Display for Regime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Solver diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub recursion_depth: usize,
    pub scalar_evaluations: usize,
    pub trace: Option<RecursionTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub optimizer: ProbVector,
    pub optimum: f64,
    pub regime: Regime,
    pub stats: SolveStats,
}

impl SolveResult {
    pub(crate) fn new(optimizer: Vec<f64>, optimum: f64, regime: Regime) -> Self {
        Self {
            optimizer: ProbVector::from_vec_unchecked(optimizer),
            optimum,
            regime,
            stats: SolveStats::default(),
        }
    }
}

/// Shifts `q` by a multiple of the all-ones vector so that it sums to one.
///
/// Returns `(q', shift)` with `q' = q + shift * 1`. On the simplex
/// `p.q' = p.q + shift`, so the maximizer is unchanged and the original
/// optimum is `optimum' - shift`.
pub fn normalize_objective(q: &ObjectiveVector) -> (ObjectiveVector, f64) {
    let n = q.len() as f64;
    let shift = (1.0 - q.sum()) / n;
    let shifted = q.iter().map(|x| x + shift).collect();
    (ObjectiveVector(shifted), shift)
}

fn is_uniform(q_norm: &[f64]) -> bool {
    let inv = 1.0 / q_norm.len() as f64;
    q_norm.iter().all(|x| (x - inv).abs() <= EPS_FEAS)
}

/// Classifies `(n, t, q)`; the first matching case wins in the order
/// `FullSimplex, Infeasible, Singleton, TwoDim, UniformObjective,
/// BallEqualsSimplexSlice, General`.
pub fn classify_regime(n: usize, t: f64, q: &ObjectiveVector) -> Regime {
    let t = clamp_purity(n, t);
    let inv = 1.0 / n as f64;
    if t >= 1.0 {
        Regime::FullSimplex
    } else if t < inv {
        Regime::Infeasible
    } else if t == inv {
        Regime::Singleton
    } else if n == 2 {
        Regime::TwoDim
    } else if is_uniform(&normalize_objective(q).0) {
        Regime::UniformObjective
    } else if t <= 1.0 / (n - 1) as f64 {
        Regime::BallEqualsSimplexSlice
    } else {
        Regime::General
    }
}

/// `p̄ = 1/n + sqrt(t - 1/n) * m`, with `m` the unit vector along `q' - 1/n`.
///
/// `q'` must sum to one. The result lies on the sphere `p.p = t` inside the
/// plane `sum(p) = 1`, but may have negative entries.
pub fn push_to_ball_boundary(q_norm: &ObjectiveVector, t: f64) -> Result<Vec<f64>> {
    let n = q_norm.len();
    let inv = 1.0 / n as f64;
    let kappa = sqrt(q_norm.iter().map(|x| (x - inv) * (x - inv)).sum());
    if kappa == 0.0 {
        return Err(Error::UniformObjective);
    }
    let delta = sqrt((t - inv).max(0.0));
    Ok(q_norm.iter().map(|x| inv + delta * (x - inv) / kappa).collect())
}

/// Pushes a normalized objective to the simplex face opposite its smallest
/// entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePush {
    /// `q̄ = 1/n + δ (q' - 1/n)` with `δ = 1/(1 - n q'_min)`.
    pub q_bar: Vec<f64>,
    /// Index of the (first) minimal entry; `q_bar[index] == 0`.
    pub index: usize,
    /// `q̄.q̄` evaluated as `δ² κ² + 1/n`.
    pub norm_sq: f64,
}

pub fn push_to_simplex_face(q_norm: &ObjectiveVector) -> Result<FacePush> {
    let n = q_norm.len();
    let inv = 1.0 / n as f64;
    let index = argmin(q_norm);
    let gap = 1.0 - n as f64 * q_norm[index];
    if gap <= 0.0 || is_uniform(q_norm) {
        return Err(Error::UniformObjective);
    }
    let delta = 1.0 / gap;
    let mut q_bar: Vec<f64> = q_norm.iter().map(|x| inv + delta * (x - inv)).collect();
    q_bar[index] = 0.0;
    let kappa_sq: f64 = q_norm.iter().map(|x| (x - inv) * (x - inv)).sum();
    Ok(FacePush { q_bar, index, norm_sq: delta * delta * kappa_sq + inv })
}

/// Zeroes entries in `[-EPS_FEAS, 0)` and rescales to unit sum.
pub(crate) fn clip_to_simplex(mut p: Vec<f64>) -> Vec<f64> {
    let mut clipped = false;
    for x in p.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
            clipped = true;
        }
    }
    if clipped {
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
    }
    p
}

/// Closed-form solution for every regime except [`Regime::General`], on a
/// normalized objective. The reported optimum is `p.q'`.
pub fn solve_special(regime: Regime, q_norm: &ObjectiveVector, t: f64) -> Result<Option<SolveResult>> {
    let n = q_norm.len();
    let inv = 1.0 / n as f64;
    let optimizer = match regime {
        Regime::General => return Ok(None),
        Regime::Infeasible => return Err(Error::Infeasible { t, min_purity: inv }),
        Regime::FullSimplex => ProbVector::vertex(n, argmax(q_norm)).into_vec(),
        Regime::Singleton | Regime::UniformObjective => vec![inv; n],
        Regime::TwoDim => {
            let r = sqrt((2.0 * t - 1.0).max(0.0));
            let sign = if 2.0 * q_norm[0] - 1.0 >= 0.0 { 1.0 } else { -1.0 };
            vec![0.5 * (1.0 + r * sign), 0.5 * (1.0 - r * sign)]
        }
        Regime::BallEqualsSimplexSlice => clip_to_simplex(push_to_ball_boundary(q_norm, t)?),
    };
    let optimum = match regime {
        Regime::Singleton => q_norm.sum() / n as f64,
        _ => dot(&optimizer, q_norm),
    };
    Ok(Some(SolveResult::new(optimizer, optimum, regime)))
}

/// `p >= 0`, `sum(p) = 1` and `p.p <= t`, each within [`EPS_FEAS`].
pub fn check_feasible(p: &[f64], t: f64) -> bool {
    feasibility_violation(p, t) <= EPS_FEAS
}

/// Largest violation among the three constraints of `P(t)`.
pub fn feasibility_violation(p: &[f64], t: f64) -> f64 {
    if p.is_empty() {
        return f64::INFINITY;
    }
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = p.iter().sum();
    let purity = dot(p, p);
    (-min).max((sum - 1.0).abs()).max(purity - t).max(0.0)
}
