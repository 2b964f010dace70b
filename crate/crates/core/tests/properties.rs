use proptest::prelude::*;

use infdiv::cf_core::{ecf, ecf_point, make_grid, moments, Sample};
use infdiv::idtest::{run_test, stat_t3_ecf, Decision, Statistic, TestConfig};
use infdiv::refdist::RefDist;

fn sample_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 2..max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sym_values_match_pairwise_average(xs in sample_strategy(25), t_max in 0.1f64..10.0) {
        let n = xs.len();
        let s = Sample::new(xs.clone()).unwrap();
        let e = ecf(&s, &make_grid(t_max, 17).unwrap()).unwrap();
        for (k, &t) in e.grid.points().iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        acc += (t * (xs[i] - xs[j])).cos();
                    }
                }
            }
            prop_assert!((e.sym_values[k] - acc / (n * (n - 1)) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn ecf_is_bounded_and_hermitian(xs in sample_strategy(40), t in -20.0f64..20.0) {
        let z = ecf_point(&xs, t);
        let w = ecf_point(&xs, -t);
        prop_assert!(z.norm() <= 1.0 + 1e-12);
        prop_assert!((z.re - w.re).abs() < 1e-12);
        prop_assert!((z.im + w.im).abs() < 1e-12);
        prop_assert_eq!(ecf_point(&xs, 0.0).re, 1.0);
    }

    #[test]
    fn symmetric_sample_has_real_ecf(half in sample_strategy(20), t in 0.0f64..15.0) {
        let mut xs = half.clone();
        xs.extend(half.iter().map(|x| -x));
        prop_assert!(ecf_point(&xs, t).im.abs() < 1e-12);
    }

    #[test]
    fn lyapunov_on_sample_moments(xs in sample_strategy(50)) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let m = moments(&Sample::new(xs).unwrap(), &[0.5, 1.5], true).unwrap();
        prop_assert!(m.lyapunov_holds(1e-9));
    }

    #[test]
    fn t3_invariant_under_scaling(xs in sample_strategy(40), pick in 0usize..2) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let c = [0.5, 2.0][pick];
        let s = Sample::new(xs).unwrap();
        let grid = make_grid(6.0, 33).unwrap();
        let base = stat_t3_ecf(&ecf(&s, &grid).unwrap(), 2.0 * s.variance().unwrap()).unwrap();
        let sc = s.scaled(c).unwrap();
        let sc_grid = grid.scaled(1.0 / c).unwrap();
        let scaled = stat_t3_ecf(&ecf(&sc, &sc_grid).unwrap(), 2.0 * sc.variance().unwrap()).unwrap();
        prop_assert!((base.value - scaled.value).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn report_invariants_hold(seed in 0u64..1000, pick in 0usize..3) {
        let dist = [RefDist::Uniform { a: 1.0 }, RefDist::Laplace { b: 1.0 }, RefDist::Triangular { a: 1.0 }][pick];
        let s = dist.sample(120, seed).unwrap();
        let cfg = TestConfig {
            statistics: vec![Statistic::T3, Statistic::T4, Statistic::Tmom],
            bootstrap_b: 99,
            seed,
            ..Default::default()
        };
        let rep = run_test(&s, &cfg).unwrap();
        for r in &rep.statistics {
            prop_assert!(r.observed >= 0.0);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            prop_assert!((0.0..=1.0).contains(&r.adjusted_p_value));
        }
        let any_adjusted = rep.statistics.iter().any(|r| r.adjusted_p_value < cfg.alpha);
        prop_assert_eq!(rep.decision == Decision::RejectId, any_adjusted);
        for trace in &rep.diagnostics.deficits {
            if trace.statistic == Statistic::T4 {
                let grid = make_grid(rep.grid_t_max, rep.grid_points).unwrap();
                for &t in &trace.t {
                    prop_assert!(grid.points().contains(&(t / 2.0)));
                }
            }
        }
    }
}

#[test]
fn decision_invariant_under_scaling_with_automatic_grid() {
    let cfg = TestConfig {
        bootstrap_b: 99,
        ..Default::default()
    };
    for (dist, seed) in [
        (RefDist::Uniform { a: 1.0 }, 1),
        (RefDist::Gaussian { sigma: 1.0 }, 2),
    ] {
        let s = dist.sample(300, seed).unwrap();
        let base = run_test(&s, &cfg).unwrap();
        for c in [0.5, 2.0] {
            let rep = run_test(&s.scaled(c).unwrap(), &cfg).unwrap();
            assert_eq!(rep.decision, base.decision);
            for (a, b) in rep.statistics.iter().zip(&base.statistics) {
                assert!((a.observed - b.observed).abs() < 1e-10);
            }
        }
    }
}
