//! Dimension-reducing solver.
//!
//! At each level the ball-boundary candidate `p̄` is tried first. When it
//! leaves the simplex, the objective is pushed onto the face opposite its
//! smallest entry; the optimizer vanishes on that coordinate, so it is
//! removed and the problem is solved one dimension lower. The recursion is
//! unrolled into a loop over a shrinking vector.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::math::dot;
use crate::simplex::{
    clamp_purity, classify_regime, clip_to_simplex, normalize_objective, push_to_ball_boundary,
    push_to_simplex_face, solve_special, ObjectiveVector, SolveResult, EPS_FEAS,
};

/// Coordinates removed by the recursion, in removal order, as indices of
/// the original objective.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecursionTrace {
    pub removed_indices: Vec<usize>,
    pub depth: usize,
}

pub fn solve_recursive(q: &ObjectiveVector, t: f64) -> Result<SolveResult> {
    let n = q.len();
    let t = clamp_purity(n, t);
    let regime = classify_regime(n, t, q);
    let (q_norm, _) = normalize_objective(q);

    if let Some(mut r) = solve_special(regime, &q_norm, t)? {
        r.optimum = dot(&r.optimizer, q);
        r.stats.iterations = 1;
        return Ok(r);
    }

    let mut active: Vec<usize> = (0..n).collect();
    let mut current = q_norm.into_vec();
    let mut trace = RecursionTrace::default();
    let mut levels = 0;

    let reduced = loop {
        levels += 1;
        let m = current.len();
        let cur = ObjectiveVector::new(current)?;
        let sub_regime = classify_regime(m, t, &cur);
        if let Some(r) = solve_special(sub_regime, &cur, t)? {
            break r.optimizer.into_vec();
        }

        let p_bar = push_to_ball_boundary(&cur, t)?;
        let min = p_bar.iter().copied().fold(f64::INFINITY, f64::min);
        if min >= -EPS_FEAS {
            break clip_to_simplex(p_bar);
        }

        let face = push_to_simplex_face(&cur)?;
        if face.norm_sq >= t {
            break clip_to_simplex(p_bar);
        }

        let mut q_bar = face.q_bar;
        q_bar.remove(face.index);
        trace.removed_indices.push(active.remove(face.index));
        let s: f64 = q_bar.iter().sum();
        let shift = (1.0 - s) / q_bar.len() as f64;
        q_bar.iter_mut().for_each(|x| *x += shift);
        current = q_bar;
    };

    let mut optimizer = vec![0.0; n];
    for (&orig, &x) in active.iter().zip(&reduced) {
        optimizer[orig] = x;
    }
    let optimum = dot(&optimizer, q);
    trace.depth = trace.removed_indices.len();

    let mut result = SolveResult::new(optimizer, optimum, regime);
    result.stats.iterations = levels;
    result.stats.recursion_depth = trace.depth;
    result.stats.trace = Some(trace);
    Ok(result)
}
