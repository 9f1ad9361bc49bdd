//! Timing harness for the vector solvers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use purity_core::{ObjectiveVector, Solver};

use crate::error::{CliError, Result};

/// Largest cross-solver spread of optima tolerated on one instance.
pub const AGREEMENT_TOL: f64 = 1e-7;

fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn dirichlet(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Flat-Dirichlet objective, determined by `(seed, index)`.
pub fn gen_random_instance(n: usize, seed: u64, index: u64) -> ObjectiveVector {
    let mut rng = instance_rng(seed, index);
    ObjectiveVector::new(dirichlet(&mut rng, n)).expect("finite and non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TPolicy {
    Fixed(f64),
    /// `t` drawn uniformly from `(1/n, 1)` per instance.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub n_values: Vec<usize>,
    pub samples_per_n: usize,
    pub t_policy: TPolicy,
    pub solvers: Vec<Solver>,
    pub seed: u64,
    /// Each solve is timed this many times and the median kept.
    pub repeats: usize,
    /// Instances are spread over this many threads; each solve is still
    /// timed on its own.
    pub threads: usize,
    /// Where a disagreeing instance is written.
    pub repro_path: PathBuf,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n_values: vec![250, 500, 1000],
            samples_per_n: 50,
            t_policy: TPolicy::Uniform,
            solvers: vec![Solver::Dual, Solver::Recursive],
            seed: 0,
            repeats: 1,
            threads: 1,
            repro_path: PathBuf::from("disagreement.json"),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(CliError::Validation("at least one solver is required".into()));
        }
        if self.samples_per_n == 0 {
            return Err(CliError::Validation("samples per n must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.n_values.iter().any(|&n| n < 2) {
            return Err(CliError::Validation("n values must be at least 2".into()));
        }
        if !self.n_values.windows(2).all(|w| w[0] <= w[1]) {
            return Err(CliError::Validation("n values must be sorted ascending".into()));
        }
        if self.repeats == 0 || self.threads == 0 {
            return Err(CliError::Validation("repeats and threads must be positive".into()));
        }
        if let TPolicy::Fixed(t) = self.t_policy {
            if !t.is_finite() {
                return Err(CliError::Validation("t must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub solver: String,
    pub sample: usize,
    pub seconds: f64,
    pub optimum: f64,
    pub regime: String,
}

/// Instance index inside the stream for `seed`; distinct for every `(n, sample)`.
fn instance_index(n: usize, sample: usize) -> u64 {
    ((n as u64) << 32) | sample as u64
}

/// Objective and purity budget of one benchmark instance.
pub fn bench_instance(config: &BenchConfig, n: usize, sample: usize) -> (ObjectiveVector, f64) {
    let mut rng = instance_rng(config.seed, instance_index(n, sample));
    let q = ObjectiveVector::new(dirichlet(&mut rng, n)).expect("finite");
    let t = match config.t_policy {
        TPolicy::Fixed(t) => t,
        TPolicy::Uniform => {
            let lo = 1.0 / n as f64;
            lo + rng.random::<f64>() * (1.0 - lo)
        }
    };
    (q, t)
}

#[derive(Serialize)]
struct Repro<'a> {
    n: usize,
    sample: usize,
    t: f64,
    q: &'a [f64],
    optima: BTreeMap<&'static str, f64>,
}

fn run_instance(config: &BenchConfig, n: usize, sample: usize) -> Result<Vec<BenchRow>> {
    let (q, t) = bench_instance(config, n, sample);
    let mut rows = Vec::with_capacity(config.solvers.len());
    for &solver in &config.solvers {
        let mut times = Vec::with_capacity(config.repeats);
        let mut last = None;
        for _ in 0..config.repeats {
            let start = Instant::now();
            let r = solver.solve(&q, t, false);
            times.push(start.elapsed().as_secs_f64());
            last = Some(r?);
        }
        times.sort_by(f64::total_cmp);
        let r = last.expect("repeats >= 1");
        rows.push(BenchRow {
            n,
            solver: solver.name().to_string(),
            sample,
            seconds: times[times.len() / 2],
            optimum: r.optimum,
            regime: r.regime.name().to_string(),
        });
    }

    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.optimum), b.max(r.optimum)));
    let spread = hi - lo;
    if spread > AGREEMENT_TOL {
        let repro = Repro {
            n,
            sample,
            t,
            q: &q,
            optima: config.solvers.iter().zip(&rows).map(|(s, r)| (s.name(), r.optimum)).collect(),
        };
        crate::io::write_json(&config.repro_path, &repro)?;
        return Err(CliError::SolverDisagreement {
            n,
            sample,
            spread,
            repro: config.repro_path.display().to_string(),
        });
    }
    Ok(rows)
}

/// Times every `(n, sample, solver)` combination.
///
/// Rows come back in `(n, sample, solver)` order regardless of execution
/// order and threading, and are also written to `sink` when one is given.
pub fn run_bench<W: Write>(config: &BenchConfig, sink: Option<&mut csv::Writer<W>>) -> Result<Vec<BenchRow>> {
    config.validate()?;
    // Sizes are interleaved so that slow drift in machine speed spreads
    // evenly over all n instead of biasing whichever n runs last.
    let jobs: Vec<(usize, usize)> = (0..config.samples_per_n)
        .flat_map(|s| config.n_values.iter().map(move |&n| (n, s)))
        .collect();

    let mut per_job: Vec<Option<Result<Vec<BenchRow>>>> = (0..jobs.len()).map(|_| None).collect();
    if config.threads == 1 {
        for (slot, &(n, s)) in per_job.iter_mut().zip(&jobs) {
            let r = run_instance(config, n, s);
            let failed = r.is_err();
            *slot = Some(r);
            if failed {
                break;
            }
        }
    } else {
        let chunk = jobs.len().div_ceil(config.threads);
        std::thread::scope(|scope| {
            for (slots, js) in per_job.chunks_mut(chunk).zip(jobs.chunks(chunk)) {
                scope.spawn(move || {
                    for (slot, &(n, s)) in slots.iter_mut().zip(js) {
                        *slot = Some(run_instance(config, n, s));
                    }
                });
            }
        });
    }

    let mut done: Vec<((usize, usize), Vec<BenchRow>)> = Vec::with_capacity(jobs.len());
    for (&job, r) in jobs.iter().zip(per_job) {
        if let Some(r) = r {
            done.push((job, r?));
        }
    }
    done.sort_by_key(|&(job, _)| job);
    let rows: Vec<BenchRow> = done.into_iter().flat_map(|(_, r)| r).collect();
    if let Some(w) = sink {
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| CliError::io("csv output", e))?;
    }
    Ok(rows)
}

/// Mean solve time per `(solver, n)`.
pub fn mean_times(rows: &[BenchRow]) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut acc: BTreeMap<(String, usize), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.solver.clone(), r.n)).or_insert((0.0, 0));
        e.0 += r.seconds;
        e.1 += 1;
    }
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for ((solver, n), (sum, count)) in acc {
        out.entry(solver).or_default().push((n as f64, sum / count as f64));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    /// Ascending powers of `x`.
    pub coeffs: Vec<f64>,
    pub rms_residual: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Least-squares polynomial of the given degree.
///
/// `x` is rescaled to `[-1, 1]`-ish magnitudes before the SVD solve so that
/// high powers of large `n` stay well conditioned.
pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() <= degree {
        return Err(CliError::DegenerateDesign);
    }
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.0.abs())).max(f64::MIN_POSITIVE);
    let m = points.len();
    let a = DMatrix::from_fn(m, degree + 1, |i, j| (points[i].0 / scale).powi(j as i32));
    let b = DVector::from_iterator(m, points.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let sol = svd
        .solve(&b, 1e-14)
        .map_err(|e| CliError::Validation(format!("least squares failed: {e}")))?;
    let coeffs: Vec<f64> = sol.iter().enumerate().map(|(j, c)| c / scale.powi(j as i32)).collect();
    let residual = &a * &sol - &b;
    let rms_residual = (residual.norm_squared() / m as f64).sqrt();
    Ok(PolyFit { coeffs, rms_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        let a = gen_random_instance(4, 1, 0);
        let b = gen_random_instance(4, 1, 0);
        assert_eq!(a, b);
        assert_ne!(a, gen_random_instance(4, 1, 1));
        assert!((a.sum() - 1.0).abs() < 1e-12);
        assert!(a.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn first_coordinate_is_uniform_at_n2() {
        let draws = 100_000;
        let mut xs: Vec<f64> = (0..draws).map(|i| gen_random_instance(2, 7, i)[0]).collect();
        xs.sort_by(f64::total_cmp);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / draws as f64 - x).abs().max((x - i as f64 / draws as f64).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn fits_exact_polynomials() {
        let line: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, 2.0 * x as f64)).collect();
        let f = fit_polynomial(&line, 1).unwrap();
        assert!(f.coeffs[0].abs() < 1e-10 && (f.coeffs[1] - 2.0).abs() < 1e-10);
        assert!(f.rms_residual < 1e-10);

        let square: Vec<(f64, f64)> = (1..6).map(|x| (x as f64 * 100.0, (x as f64 * 100.0).powi(2))).collect();
        let f = fit_polynomial(&square, 2).unwrap();
        assert!(f.coeffs[0].abs() < 1e-6 && f.coeffs[1].abs() < 1e-8 && (f.coeffs[2] - 1.0).abs() < 1e-10);
        assert!((f.eval(300.0) - 90_000.0).abs() < 1e-6);
    }

    #[test]
    fn degenerate_design() {
        let pts = [(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)];
        assert!(matches!(fit_polynomial(&pts, 1), Err(CliError::DegenerateDesign)));
    }

    #[test]
    fn config_validation() {
        let cfg = BenchConfig { solvers: vec![], ..BenchConfig::default() };
        assert!(matches!(run_bench::<Vec<u8>>(&cfg, None), Err(CliError::Validation(_))));
        let cfg = BenchConfig { n_values: vec![8, 4], ..BenchConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
