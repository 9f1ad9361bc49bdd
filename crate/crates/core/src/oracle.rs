//! Brute-force reference solver used to check the fast solvers.
//!
//! The optimizer of `max p.q` over `P(t)` is supported on the `k` largest
//! entries of `q` for some `k`, and on that support it is an affine function
//! of `q`. The oracle enumerates every `k`, builds the best candidate of that
//! form, and keeps the best feasible one. For small `n` it also draws random
//! feasible points and fails loudly if any of them beats the reported optimum.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{dot, sqrt};
use crate::random;
use crate::simplex::{clamp_purity, classify_regime, ObjectiveVector, SolveResult, EPS_FEAS};

/// Largest dimension accepted by the top-k sweep.
pub const ORACLE_CAP: usize = 4096;
/// Largest dimension for which the random cross-check runs.
pub const SAMPLING_CAP: usize = 16;
pub const SAMPLES: usize = 10_000;
const SAMPLING_SEED: u64 = 0x5eed_0fac_1e00;

pub fn oracle_solve(q: &ObjectiveVector, t: f64) -> Result<SolveResult> {
    let n = q.len();
    if n > ORACLE_CAP {
        return Err(Error::DimensionTooLarge { n, cap: ORACLE_CAP });
    }
    let t = clamp_purity(n, t);
    if t < 1.0 / n as f64 {
        return Err(Error::Infeasible { t, min_purity: 1.0 / n as f64 });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| q[b].total_cmp(&q[a]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| q[i]).collect();

    // (value, k, c, mean)
    let mut best: Option<(f64, usize, f64, f64)> = None;
    let mut sum = 0.0;
    for k in 1..=n {
        sum += sorted[k - 1];
        let inv_k = 1.0 / k as f64;
        if inv_k > t {
            continue;
        }
        let top = &sorted[..k];
        let mean = sum / k as f64;
        let spread: f64 = top.iter().map(|x| (x - mean) * (x - mean)).sum();
        let c = if spread > 0.0 {
            let c_purity = sqrt((t - inv_k).max(0.0) / spread);
            let lowest = top[k - 1];
            if lowest < mean {
                c_purity.min(inv_k / (mean - lowest))
            } else {
                c_purity
            }
        } else {
            0.0
        };
        let value = mean + c * spread;
        if best.is_none_or(|b| value > b.0) {
            best = Some((value, k, c, mean));
        }
    }

    let (_, k, c, mean) = best.expect("k = n is always feasible");
    let inv_k = 1.0 / k as f64;
    let mut optimizer = vec![0.0; n];
    for &i in &order[..k] {
        optimizer[i] = (inv_k + c * (q[i] - mean)).max(0.0);
    }
    let optimum = dot(&optimizer, q);

    if n <= SAMPLING_CAP {
        cross_check(q, t, optimum)?;
    }

    let mut result = SolveResult::new(optimizer, optimum, classify_regime(n, t, q));
    result.stats.iterations = n;
    Ok(result)
}

fn cross_check(q: &[f64], t: f64, optimum: f64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    let l1: f64 = q.iter().map(|x| x.abs()).sum();
    let tol = EPS_FEAS * (1.0 + l1);
    for _ in 0..SAMPLES {
        let p = random::feasible_point(&mut rng, q.len(), t);
        let value = dot(&p, q);
        if value > optimum + tol {
            return Err(Error::OracleViolation { sample: value, optimum });
        }
    }
    Ok(())
}
