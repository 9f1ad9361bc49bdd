//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use purity::bench::{fit_polynomial, mean_times, run_bench, BenchConfig, TPolicy};
use purity_core::channel::{
    closed_form_o_t, entanglement_fidelity_bounded_purity, multiplicativity_gap, noisy_ground_energy,
    ChannelRep, ExampleChannelKind, GapMode,
};
use purity_core::dual::{dual_h, minimize_h, solve_dual, z_interval};
use purity_core::operator::HermitianOperator;
use purity_core::oracle::oracle_solve;
use purity_core::random;
use purity_core::recursive::solve_recursive;
use purity_core::simplex::{feasibility_violation, normalize_objective};
use purity_core::tomography::mle_purity_leq;
use purity_core::{ObjectiveVector, Solver};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn with_budget(budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail = format!("{}; {:.2} s", o.detail, elapsed.as_secs_f64());
    if let Some(b) = budget {
        if elapsed > b {
            o.pass = false;
            o.detail = format!("{} (budget {:.0} s exceeded)", o.detail, b.as_secs_f64());
        }
    }
    o
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

fn random_objective(rng: &mut ChaCha8Rng, n: usize) -> ObjectiveVector {
    ObjectiveVector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn random_t(rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let lo = 1.0 / n as f64;
    lo + rng.random::<f64>() * (1.0 - lo)
}

fn basis_vector_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 4, 8, 16, 64] {
        let mut q = vec![0.0; n];
        q[0] = 1.0;
        let q = ObjectiveVector::new(q).unwrap();
        let nf = n as f64;
        for i in 1..=20 {
            let t = 1.0 / nf + (1.0 - 1.0 / nf) * i as f64 / 20.0;
            let expected = (1.0 + ((nf * t - 1.0) * (nf - 1.0)).sqrt()) / nf;
            for solver in [Solver::Dual, Solver::Recursive] {
                let got = solver.solve(&q, t, false).map(|r| r.optimum).unwrap_or(f64::NAN);
                worst = worst.max((got - expected).abs());
                if got.is_nan() {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("max error {worst:.2e} (tol 1e-10)"))
}

fn channel_grid(kind: ExampleChannelKind, tol: f64) -> Outcome {
    let ch = kind.channel();
    let (lo, hi) = kind.window();
    let mut worst: f64 = 0.0;
    for t in grid(lo, hi, 50) {
        let num = entanglement_fidelity_bounded_purity(&ch, t, Solver::Dual).unwrap_or(f64::NAN);
        let cf = closed_form_o_t(kind, t).unwrap_or(f64::NAN);
        let err = (num - cf).abs();
        worst = if err.is_nan() { f64::INFINITY } else { worst.max(err) };
    }
    outcome(worst <= tol, format!("50-point grid over [{lo}, {hi}], max error {worst:.2e} (tol {tol:e})"))
}

fn multiplicativity() -> Outcome {
    let id = ExampleChannelKind::Identity(2);
    let tr = ExampleChannelKind::Trace(2);
    let gap = |a, b, t, m| multiplicativity_gap(a, b, t, m, Solver::Dual).map(|g| g.gap).unwrap_or(f64::NAN);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let mut check = |label: &str, g: f64, ok: bool| {
        summary.push(format!("{label}={g:.2e}"));
        if !ok {
            failures.push(label.to_string());
        }
    };
    for t in [0.3, 0.5, 0.7] {
        let g = gap(id, id, t, GapMode::SameT);
        check(&format!("IxI@{t}"), g, g > 1e-6);
    }
    let g = gap(id, id, 1.0, GapMode::SameT);
    check("IxI@1", g, g.abs() < 1e-8);
    let g = gap(tr, tr, 0.3, GapMode::SameT);
    check("TxT@0.3", g, g > 1e-6);
    let g = gap(tr, tr, 0.75, GapMode::SameT);
    check("TxT@0.75", g, g.abs() < 1e-8);
    let g = gap(tr, tr, 1.0 / 16.0, GapMode::SqrtT);
    check("TxT sqrt@1/16", g, g.abs() < 1e-8);
    let detail = summary.join(" ");
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; failing: {}", failures.join(", ")))
    }
}

fn ground_energy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::INFINITY;
    let mut errors = 0;
    for i in 0..1000 {
        let d = 2 + i % 3;
        let r = rng.random_range(1..=d * d);
        let kraus = random::channel_kraus(&mut rng, d, d, r);
        let ch = ChannelRep::from_kraus(d, d, kraus).unwrap();
        let h = HermitianOperator::new(random::hermitian(&mut rng, d)).unwrap();
        let lmin = *h.eigenvalues().last().unwrap();
        match noisy_ground_energy(&ch, &h) {
            Ok(v) => worst = worst.min(v - lmin),
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst >= -1e-9,
        format!("1000 pairs, min lambda_min(N†(H)) - lambda_min(H) = {worst:.2e}, errors {errors}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut spread, mut infeasible): (f64, f64) = (0.0, 0.0);
    let mut errors = 0;
    for _ in 0..500 {
        let n = rng.random_range(2..=12);
        let q = random_objective(&mut rng, n);
        let t = random_t(&mut rng, n);
        let results = [solve_dual(&q, t, false), solve_recursive(&q, t), oracle_solve(&q, t)];
        if results.iter().any(|r| r.is_err()) {
            errors += 1;
            continue;
        }
        let rs: Vec<_> = results.into_iter().map(Result::unwrap).collect();
        for a in &rs {
            infeasible = infeasible.max(feasibility_violation(&a.optimizer, t));
            for b in &rs {
                spread = spread.max((a.optimum - b.optimum).abs());
            }
        }
    }
    outcome(
        errors == 0 && spread <= 1e-9 && infeasible <= 1e-9,
        format!("500 instances, max pairwise gap {spread:.2e}, max infeasibility {infeasible:.2e}, errors {errors}"),
    )
}

fn exact_purity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut purity_err, mut value_err): (f64, f64) = (0.0, 0.0);
    let mut errors = 0;
    for i in 0..200 {
        let n = rng.random_range(2..=40);
        // every fourth instance has a repeated maximum so that blending is exercised
        let mut q: Vec<f64> = random_objective(&mut rng, n).into_vec();
        if i % 4 == 0 {
            let m = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let j = rng.random_range(0..n);
            q[j] = m;
        }
        let q = ObjectiveVector::new(q).unwrap();
        let t = random_t(&mut rng, n);
        match (solve_dual(&q, t, false), solve_dual(&q, t, true)) {
            (Ok(a), Ok(b)) => {
                purity_err = purity_err.max((b.optimizer.purity() - t).abs());
                value_err = value_err.max((a.optimum - b.optimum).abs());
            }
            _ => errors += 1,
        }
    }
    outcome(
        errors == 0 && purity_err <= 1e-9 && value_err <= 1e-12,
        format!("200 instances, max |p.p - t| {purity_err:.2e}, max optimum change {value_err:.2e}, errors {errors}"),
    )
}

fn tomography() -> Outcome {
    let h = HermitianOperator::diagonal(&[1.2, -0.2]);
    let diag_err = |t: f64, expected: [f64; 2]| -> f64 {
        match mle_purity_leq(&h, t) {
            Ok(e) => {
                let m = e.rho.matrix();
                let mut err: f64 = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        let target = if i == j { expected[i] } else { 0.0 };
                        err = err.max((m[(i, j)].re - target).abs()).max(m[(i, j)].im.abs());
                    }
                }
                err
            }
            Err(_) => f64::INFINITY,
        }
    };
    let a = diag_err(0.58, [0.7, 0.3]);
    let b = diag_err(1.0, [1.0, 0.0]);
    outcome(a <= 1e-8 && b <= 1e-8, format!("t=0.58 error {a:.2e}, t=1 error {b:.2e} (tol 1e-8)"))
}

fn scaling() -> Outcome {
    let config = BenchConfig {
        n_values: vec![250, 500, 1000, 2000, 4000, 8000],
        samples_per_n: 50,
        t_policy: TPolicy::Uniform,
        solvers: vec![Solver::Dual, Solver::Recursive],
        seed: 2024,
        repeats: 3,
        threads: 1,
        repro_path: std::env::temp_dir().join("purity-acceptance-disagreement.json"),
    };
    // warm caches and the allocator before timing
    let warmup = BenchConfig { n_values: vec![1000], samples_per_n: 5, ..config.clone() };
    let _ = run_bench::<Vec<u8>>(&warmup, None);

    let rows = match run_bench::<Vec<u8>>(&config, None) {
        Ok(rows) => rows,
        Err(e) => return outcome(false, format!("bench failed: {e}")),
    };
    let means = mean_times(&rows);
    let rms = |solver: &str, degree: usize| fit_polynomial(&means[solver], degree).map(|f| f.rms_residual).unwrap_or(f64::NAN);
    let (d1, d3) = (rms("dual", 1), rms("dual", 3));
    let (r2, r3) = (rms("recursive", 2), rms("recursive", 3));
    let last = |solver: &str| means[solver].last().map(|p| p.1).unwrap_or(f64::NAN);
    let ratio = last("recursive") / last("dual");
    let per_size = |solver: &str, power: i32| -> String {
        means[solver].iter().map(|(n, t)| format!("{:.2}", t / n.powi(power) * 1e9)).collect::<Vec<_>>().join("/")
    };
    let shape = format!("dual ns/n {}; recursive ns/n^2 {}", per_size("dual", 1), per_size("recursive", 2));
    let a = d1 <= 1.5 * d3;
    let b = r2 <= 1.5 * r3;
    let c = ratio >= 10.0;
    outcome(
        a && b && c,
        format!(
            "(a) dual rms deg1 {d1:.2e} vs deg3 {d3:.2e} [{}]; (b) recursive rms deg2 {r2:.2e} vs deg3 {r3:.2e} [{}]; \
             (c) mean time at n=8000 recursive/dual = {ratio:.1} [{}]; {shape}",
            if a { "ok" } else { "fail" },
            if b { "ok" } else { "fail" },
            if c { "ok" } else { "fail" },
        ),
    )
}

fn duality_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut below, mut above): (f64, f64) = (0.0, 0.0);
    let mut errors = 0;
    let mut done = 0;
    while done < 100 {
        let n = rng.random_range(3..=50);
        let q = random_objective(&mut rng, n);
        let t = random_t(&mut rng, n);
        let (qn, shift) = normalize_objective(&q);
        let (Ok(iv), Ok(state), Ok(r)) = (z_interval(&qn, t), minimize_h(&qn, t), solve_dual(&q, t, false)) else {
            errors += 1;
            done += 1;
            continue;
        };
        let optimum = r.optimum + shift;
        for _ in 0..50 {
            let z = iv.z_min + rng.random::<f64>() * (iv.z_max - iv.z_min);
            below = below.max(optimum - dual_h(z, &qn, t));
        }
        above = above.max(state.h_star - optimum);
        done += 1;
    }
    outcome(
        errors == 0 && below <= 1e-9 && above <= 1e-9,
        format!("100 instances x 50 z, max(optimum - h(z)) {below:.2e}, h(z*) - optimum {above:.2e}, errors {errors}"),
    )
}

type Criterion = (usize, &'static str, Option<Duration>, fn() -> Outcome);

fn main() -> ExitCode {
    // Accept and ignore libtest flags such as --nocapture.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: Vec<Criterion> = vec![
        (1, "basis-vector closed form", Some(Duration::from_secs(1)), basis_vector_closed_form),
        (2, "trace-channel O_t", Some(Duration::from_secs(5)), || channel_grid(ExampleChannelKind::Trace(2), 1e-8)),
        (3, "identity-channel O_t", None, || channel_grid(ExampleChannelKind::Identity(2), 1e-8)),
        (4, "identity x trace O_t", None, || channel_grid(ExampleChannelKind::IdentityTensorTrace(2), 1e-7)),
        (5, "multiplicativity gaps", None, multiplicativity),
        (6, "ground-energy monotonicity", Some(Duration::from_secs(30)), ground_energy),
        (7, "oracle equivalence", None, oracle_equivalence),
        (8, "exact purity", None, exact_purity),
        (9, "tomography round trip", None, tomography),
        (10, "scaling study", Some(Duration::from_secs(600)), scaling),
        (11, "duality sandwich", None, duality_sandwich),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| id.to_string() == *p || name.contains(p.as_str())) {
            continue;
        }
        let o = with_budget(budget, f);
        println!("[{}] criterion {id}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
