//! Lagrange-dual solver.
//!
//! For `1/n < t < 1` and `sum(q) = 1`, the optimum of `max p.q` over `P(t)`
//! equals `min_z h(z)` with
//!
//! ```text
//! h(z) = sqrt(t) * ||v(z)||_2 + z,    v_i(z) = max(0, q_i - z)
//! ```
//!
//! `h` is convex, decreasing left of `z_min` and increasing right of
//! `z_max = max(q)`, so a golden-section search over `[z_min, z_max]`
//! finds the optimum. The primal optimizer is then read off the KKT
//! conditions: it is proportional to `v(z*)`, or uniform over the maximal
//! entries of `q` when `v(z*) = 0`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::golden::GoldenSection;
use crate::math::{argmax, dot, sqrt};
use crate::simplex::{
    clamp_purity, classify_regime, feasibility_violation, normalize_objective, solve_special,
    ObjectiveVector, ProbVector, Regime, SolveResult, EPS_FEAS,
};

/// Relative bracket tolerance for the golden-section search.
pub const EPS_Z: f64 = 1e-12;
/// Golden-section iteration cap.
pub const MAX_ITER: usize = 200;
/// Below this norm `v(z*)` counts as zero.
pub const EPS_V: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualState {
    pub z_min: f64,
    pub z_max: f64,
    pub z_star: f64,
    pub h_star: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl DualState {
    /// Multiplier `w* = ||v(z*)|| / sqrt(4t)` of the purity constraint.
    pub fn purity_multiplier(&self, q_norm: &[f64], t: f64) -> f64 {
        v_norm(q_norm, self.z_star) / sqrt(4.0 * t)
    }

    /// Multipliers `u*_i = max(0, z* - q_i)` of the nonnegativity constraints.
    pub fn nonnegativity_multipliers(&self, q_norm: &[f64]) -> Vec<f64> {
        q_norm.iter().map(|&x| (self.z_star - x).max(0.0)).collect()
    }
}

fn v_norm(q: &[f64], z: f64) -> f64 {
    sqrt(
        q.iter()
            .map(|&x| {
                let v = x - z;
                if v > 0.0 {
                    v * v
                } else {
                    0.0
                }
            })
            .sum(),
    )
}

/// `h(z)`; equals `z` once `z >= max(q')` because `v(z)` vanishes there.
pub fn dual_h(z: f64, q_norm: &[f64], t: f64) -> f64 {
    sqrt(t) * v_norm(q_norm, z) + z
}

/// Derivative `h'(z) = 1 - sqrt(t) ||v||_1 / ||v||_2`, and `1` right of `max(q')`.
pub fn dual_h_derivative(z: f64, q_norm: &[f64], t: f64) -> f64 {
    let (mut l1, mut l2) = (0.0, 0.0);
    for &x in q_norm {
        let v = x - z;
        if v > 0.0 {
            l1 += v;
            l2 += v * v;
        }
    }
    if l2 == 0.0 {
        1.0
    } else {
        1.0 - sqrt(t) * l1 / sqrt(l2)
    }
}

/// Search bracket for the minimizer of `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZInterval {
    pub z_min: f64,
    pub z_max: f64,
    /// Lower bound on `s`; `s = c + 1` is used.
    pub c: f64,
}

/// Requires `1/n < t < 1`.
pub fn z_interval(q_norm: &[f64], t: f64) -> Result<ZInterval> {
    let n = q_norm.len() as f64;
    if !(t > 1.0 / n && t < 1.0) {
        return Err(Error::OutsideDualWindow { t });
    }
    let (mut q_max, mut q_min) = (f64::NEG_INFINITY, f64::INFINITY);
    for &x in q_norm {
        q_max = q_max.max(x);
        q_min = q_min.min(x);
    }
    let l1: f64 = q_norm.iter().map(|x| x - q_min).sum();
    let c = (1.0 - sqrt(t)) * l1 / (sqrt(n) * (sqrt(n * t) - 1.0));
    let s = c + 1.0;
    Ok(ZInterval { z_min: q_min - 2.0 * s, z_max: q_max, c })
}

pub fn minimize_h(q_norm: &[f64], t: f64) -> Result<DualState> {
    let bracket = z_interval(q_norm, t)?;
    // Entries at or below the bracket's lower end add exactly zero to
    // ||v(z)|| for every remaining z, so they are dropped as it rises.
    let mut active: Vec<f64> = q_norm.to_vec();
    let mut pruned_at = f64::NEG_INFINITY;
    let m = GoldenSection::new(EPS_Z, MAX_ITER).minimize_bracketed(
        |z, lo| {
            if lo > pruned_at {
                active.retain(|&x| x > lo);
                pruned_at = lo;
            }
            dual_h(z, &active, t)
        },
        bracket.z_min,
        bracket.z_max,
    );
    Ok(DualState {
        z_min: bracket.z_min,
        z_max: bracket.z_max,
        z_star: m.x,
        h_star: m.fx,
        iterations: m.iterations,
        evaluations: m.evaluations,
    })
}

/// Summary of the candidate support `{i : q_i >= level}`.
struct Support {
    level: f64,
    k: usize,
    mean: f64,
    spread: f64,
    q_min_in: f64,
    q_max_out: f64,
}

impl Support {
    fn at(q: &[f64], level: f64) -> Self {
        let (mut k, mut sum, mut q_min_in, mut q_max_out) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
        for &x in q {
            if x >= level {
                k += 1;
                sum += x;
                q_min_in = q_min_in.min(x);
            } else {
                q_max_out = q_max_out.max(x);
            }
        }
        let mean = sum / k as f64;
        let spread = q.iter().filter(|&&x| x >= level).map(|x| (x - mean) * (x - mean)).sum();
        Self { level, k, mean, spread, q_min_in, q_max_out }
    }

    /// Scale `c` in `p_i = 1/k + c (q_i - mean)` giving purity `t`, and the
    /// matching threshold `z`. `None` when the support cannot reach purity
    /// `t` (too few entries).
    fn solve(&self, t: f64) -> Option<(f64, f64)> {
        let inv_k = 1.0 / self.k as f64;
        if inv_k > t + EPS_FEAS {
            return None;
        }
        if self.spread <= f64::EPSILON * f64::EPSILON * (1.0 + self.mean * self.mean) {
            // all support entries tie: uniform on the maximal set
            return Some((0.0, self.q_min_in));
        }
        let c = sqrt((t - inv_k).max(0.0) / self.spread);
        if c == 0.0 {
            return Some((0.0, f64::NEG_INFINITY));
        }
        Some((c, self.mean - inv_k / c))
    }

    /// `(needs more entries, needs fewer entries, violation)` for threshold `z`.
    fn check(&self, z: f64, scale: f64) -> (bool, bool, f64) {
        let tol = 1e-13 * scale;
        let over = self.q_max_out - z;
        let under = z - self.q_min_in;
        (over > tol, under > tol, over.max(under).max(0.0))
    }
}

fn next_level_up(q: &[f64], level: f64) -> Option<f64> {
    q.iter().copied().filter(|&x| x > level).reduce(f64::min)
}

fn next_level_down(q: &[f64], level: f64) -> Option<f64> {
    q.iter().copied().filter(|&x| x < level).reduce(f64::max)
}

/// Rebuilds the primal optimizer from `z*`.
///
/// The support `{q_i > z*}` is refined by walking one level at a time until
/// the closed-form KKT point on that support is consistent, which removes
/// the `O(sqrt(eps))` error golden-section leaves in `z*`.
pub fn reconstruct_primal(state: &DualState, q_norm: &[f64], t: f64) -> Result<ProbVector> {
    let n = q_norm.len();
    let q_max = q_norm[argmax(q_norm)];
    let scale = 1.0 + q_norm.iter().fold(0.0f64, |m, x| m.max(x.abs()));

    if v_norm(q_norm, state.z_star) <= EPS_V {
        return uniform_on_max_set(q_norm, q_max, t);
    }

    let mut level = match next_level_up(q_norm, state.z_star) {
        Some(l) => l,
        None => return uniform_on_max_set(q_norm, q_max, t),
    };
    let mut best: Option<(f64, f64, f64, Support)> = None;
    let mut visited: Vec<f64> = Vec::new();

    for _ in 0..n + 2 {
        visited.push(level);
        let support = Support::at(q_norm, level);
        let step = match support.solve(t) {
            None => next_level_down(q_norm, level),
            Some((c, z)) => {
                let (grow, shrink, violation) = support.check(z, scale);
                let better = best.as_ref().is_none_or(|b| violation < b.0);
                let next = if grow {
                    next_level_down(q_norm, level)
                } else if shrink {
                    next_level_up(q_norm, level)
                } else {
                    None
                };
                if better {
                    best = Some((violation, c, z, support));
                }
                if !grow && !shrink {
                    break;
                }
                next
            }
        };
        match step {
            Some(l) if !visited.contains(&l) => level = l,
            _ => break,
        }
    }

    let p = match best {
        Some((violation, c, _, support)) if violation <= 1e-9 * scale => {
            let inv_k = 1.0 / support.k as f64;
            let mut p: Vec<f64> = q_norm
                .iter()
                .map(|&x| if x >= support.level { (inv_k + c * (x - support.mean)).max(0.0) } else { 0.0 })
                .collect();
            let s: f64 = p.iter().sum();
            if (s - 1.0).abs() > 0.0 {
                p.iter_mut().for_each(|x| *x /= s);
            }
            p
        }
        _ => {
            let norm = v_norm(q_norm, state.z_star);
            let root_t = sqrt(t);
            q_norm.iter().map(|&x| root_t * (x - state.z_star).max(0.0) / norm).collect()
        }
    };

    let violation = feasibility_violation(&p, t);
    if violation > 10.0 * EPS_FEAS {
        return Err(Error::InternalKktViolation { violation });
    }
    Ok(ProbVector::from_vec_unchecked(p))
}

fn uniform_on_max_set(q_norm: &[f64], q_max: f64, t: f64) -> Result<ProbVector> {
    let size = q_norm.iter().filter(|&&x| x == q_max).count();
    let inv = 1.0 / size as f64;
    if inv > t + EPS_FEAS {
        return Err(Error::InternalKktViolation { violation: inv - t });
    }
    Ok(ProbVector::from_vec_unchecked(
        q_norm.iter().map(|&x| if x == q_max { inv } else { 0.0 }).collect(),
    ))
}

/// Moves `p` toward the vertex `e(i)` until `p.p = t`.
///
/// Only value-preserving when `p` is supported on maximal entries of `q`
/// and `i` is one of them. Returns `p` unchanged if it already has purity
/// at least `t - EPS_FEAS`, and the vertex itself if `t >= 1`.
pub fn blend_to_purity(p: &[f64], i: usize, t: f64) -> Vec<f64> {
    let purity = dot(p, p);
    if purity >= t - EPS_FEAS {
        return p.to_vec();
    }
    if t >= 1.0 {
        let mut e = vec![0.0; p.len()];
        e[i] = 1.0;
        return e;
    }
    // |p + δ(e - p)|² - t = a2 δ² + a1 δ + a0
    let a2 = purity - 2.0 * p[i] + 1.0;
    let a1 = 2.0 * (p[i] - purity);
    let a0 = purity - t;
    let disc = (a1 * a1 - 4.0 * a2 * a0).max(0.0);
    let mut delta = if a1 >= 0.0 {
        -2.0 * a0 / (a1 + sqrt(disc))
    } else {
        (-a1 + sqrt(disc)) / (2.0 * a2)
    };
    let blend = |d: f64| -> Vec<f64> {
        p.iter()
            .enumerate()
            .map(|(j, &x)| (1.0 - d) * x + if j == i { d } else { 0.0 })
            .collect()
    };
    if !(0.0..=1.0).contains(&delta) || !delta.is_finite() {
        // bisection on the convex a(δ) with a(0) < 0 <= a(1)
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let b = blend(mid);
            if dot(&b, &b) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        delta = 0.5 * (lo + hi);
    }
    blend(delta)
}

/// Maximizes `p.q` over `P(t)` through the dual.
///
/// With `exact_purity`, an optimizer with `p.p = t` is returned whenever
/// one exists (`t <= 1`).
pub fn solve_dual(q: &ObjectiveVector, t: f64, exact_purity: bool) -> Result<SolveResult> {
    let n = q.len();
    let t = clamp_purity(n, t);
    let regime = classify_regime(n, t, q);
    let (q_norm, _) = normalize_objective(q);

    let mut result = match regime {
        Regime::FullSimplex | Regime::Infeasible | Regime::Singleton => {
            let mut r = solve_special(regime, &q_norm, t)?.expect("base case");
            r.optimum = dot(&r.optimizer, q);
            r
        }
        _ => {
            let state = minimize_h(&q_norm, t)?;
            let p = reconstruct_primal(&state, &q_norm, t)?;
            let optimum = dot(&p, q);
            let mut r = SolveResult::new(p.into_vec(), optimum, regime);
            r.stats.iterations = state.iterations;
            r.stats.scalar_evaluations = state.evaluations;
            r
        }
    };

    if exact_purity && t <= 1.0 && result.optimizer.purity() < t - EPS_FEAS {
        let i = argmax(&q_norm);
        let blended = blend_to_purity(&result.optimizer, i, t);
        result.optimizer = ProbVector::from_vec_unchecked(blended);
    }
    Ok(result)
}
