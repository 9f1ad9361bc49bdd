use proptest::prelude::*;
use purity_core::dual::{dual_h, minimize_h, solve_dual, z_interval};
use purity_core::oracle::oracle_solve;
use purity_core::recursive::solve_recursive;
use purity_core::simplex::{check_feasible, normalize_objective};
use purity_core::{ObjectiveVector, Solver};

fn instance() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (2usize..12).prop_flat_map(|n| {
        (prop::collection::vec(-5.0f64..5.0, n), 0.0f64..1.0).prop_map(move |(q, s)| {
            let lo = 1.0 / q.len() as f64;
            (q, lo + s * (1.0 - lo))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solvers_agree_with_oracle((q, t) in instance()) {
        let q = ObjectiveVector::new(q).unwrap();
        let o = oracle_solve(&q, t).unwrap();
        let d = solve_dual(&q, t, false).unwrap();
        let r = solve_recursive(&q, t).unwrap();
        let scale = 1.0 + q.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!((o.optimum - d.optimum).abs() <= 1e-9 * scale, "{} vs {}", o.optimum, d.optimum);
        prop_assert!((o.optimum - r.optimum).abs() <= 1e-9 * scale, "{} vs {}", o.optimum, r.optimum);
        prop_assert!(check_feasible(&d.optimizer, t));
        prop_assert!(check_feasible(&r.optimizer, t));
        prop_assert!(check_feasible(&o.optimizer, t));
    }

    #[test]
    fn optimum_is_monotone_in_t((q, t) in instance(), bump in 0.0f64..0.5) {
        let q = ObjectiveVector::new(q).unwrap();
        let a = solve_dual(&q, t, false).unwrap().optimum;
        let b = solve_dual(&q, (t + bump).min(1.0), false).unwrap().optimum;
        prop_assert!(b >= a - 1e-9);
    }

    #[test]
    fn permutation_equivariance((q, t) in instance(), rot in 0usize..12) {
        let n = q.len();
        let shifted: Vec<f64> = (0..n).map(|i| q[(i + rot) % n]).collect();
        let a = solve_dual(&ObjectiveVector::new(q).unwrap(), t, false).unwrap().optimum;
        let b = solve_dual(&ObjectiveVector::new(shifted).unwrap(), t, false).unwrap().optimum;
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn exact_purity_keeps_optimum((q, t) in instance()) {
        let q = ObjectiveVector::new(q).unwrap();
        let loose = solve_dual(&q, t, false).unwrap();
        let exact = solve_dual(&q, t, true).unwrap();
        prop_assert!((exact.optimizer.purity() - t).abs() <= 1e-9);
        prop_assert!((loose.optimum - exact.optimum).abs() <= 1e-12 * (1.0 + loose.optimum.abs()));
    }

    #[test]
    fn duality_sandwich((q, t) in instance(), zs in prop::collection::vec(0.0f64..1.0, 20)) {
        let n = q.len();
        let q = ObjectiveVector::new(q).unwrap();
        let (qn, shift) = normalize_objective(&q);
        prop_assume!(t > 1.0 / n as f64 + 1e-6 && t < 1.0 - 1e-6);
        let r = solve_dual(&q, t, false).unwrap();
        let opt_norm = r.optimum + shift;
        let iv = z_interval(&qn, t).unwrap();
        for s in zs {
            let z = iv.z_min + s * (iv.z_max - iv.z_min);
            prop_assert!(dual_h(z, &qn, t) >= opt_norm - 1e-9);
        }
        let state = minimize_h(&qn, t).unwrap();
        prop_assert!(state.h_star <= opt_norm + 1e-9);
    }

    #[test]
    fn shift_invariance((q, t) in instance(), c in -10.0f64..10.0) {
        let shifted: Vec<f64> = q.iter().map(|x| x + c).collect();
        let a = solve_recursive(&ObjectiveVector::new(q).unwrap(), t).unwrap().optimum;
        let b = solve_recursive(&ObjectiveVector::new(shifted).unwrap(), t).unwrap().optimum;
        prop_assert!((b - a - c).abs() <= 1e-9 * (1.0 + c.abs() + a.abs()));
    }
}

#[test]
fn basis_vector_grid() {
    for n in [2usize, 3, 4, 8, 16, 64, 500] {
        let mut q = vec![0.0; n];
        q[0] = 1.0;
        let q = ObjectiveVector::new(q).unwrap();
        for i in 1..=20 {
            let lo = 1.0 / n as f64;
            let t = lo + (1.0 - lo) * i as f64 / 20.0;
            let expected = (1.0 + (((n as f64) * t - 1.0) * (n as f64 - 1.0)).sqrt()) / n as f64;
            for s in Solver::ALL {
                if s == Solver::Oracle && n > 16 {
                    continue;
                }
                let r = s.solve(&q, t, false).unwrap();
                assert!((r.optimum - expected).abs() < 1e-10, "{s} n={n} t={t}");
            }
        }
    }
}

#[test]
fn regimes_reported() {
    use purity_core::Regime;
    let q = ObjectiveVector::from_slice(&[0.3, 0.5, 0.2]).unwrap();
    assert_eq!(solve_dual(&q, 1.0, false).unwrap().regime, Regime::FullSimplex);
    assert_eq!(solve_dual(&q, 1.0 / 3.0, false).unwrap().regime, Regime::Singleton);
    assert_eq!(solve_dual(&q, 0.45, false).unwrap().regime, Regime::BallEqualsSimplexSlice);
    assert_eq!(solve_dual(&q, 0.7, false).unwrap().regime, Regime::General);
}
