//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use infdiv::bounds::{
    fractional_moment_via_cf, gaussian_abs_moment, iterate_th4, root_z0, th1_lower, th21_upper,
    th2_lower, th3_lower, th4_deficit, CharFn,
};
use infdiv::cf_core::{ecf_point, make_grid, symmetrize_ecf, Sample};
use infdiv::idtest::{power_study, TestConfig};
use infdiv::refdist::{registry, Divisibility, RefDist};
use infdiv::rng::CounterRng;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn grid_symmetric(half_width: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| -half_width + 2.0 * half_width * k as f64 / (count - 1) as f64)
        .collect()
}

/// Plain bisection on `sin z - z cos z` over `[π, 3π/2]`.
fn bisection_root() -> f64 {
    let g = |z: f64| z.sin() - z * z.cos();
    let (mut lo, mut hi) = (PI, 1.5 * PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c1_root() -> Outcome {
    let _ = root_z0();
    let start = Instant::now();
    let root = root_z0();
    let elapsed = start.elapsed();
    let oracle = bisection_root();
    let pass = root.residual.abs() <= 1e-12
        && root.value > 4.49
        && (root.value - oracle).abs() <= 1e-10
        && elapsed < Duration::from_millis(1);
    check(
        pass,
        format!(
            "z0 = {:.15}, residual {:.1e}, |z0 - bisection| = {:.1e}, {:?}",
            root.value,
            root.residual,
            (root.value - oracle).abs(),
            elapsed
        ),
    )
}

fn c2_sweeps() -> Outcome {
    let ts = grid_symmetric(10.0, 2000);
    let mut worst_id = 0.0f64;
    let mut notes = Vec::new();
    for d in registry() {
        if d.divisibility() != Divisibility::InfinitelyDivisible {
            continue;
        }
        let th3 = th3_lower(d.sigma2()).unwrap();
        for &t in &ts {
            let f = d.cf(t);
            worst_id = worst_id
                .max(th3.deficit(t, f))
                .max(th4_deficit(f, d.cf(t / 2.0)));
        }
        notes.push(d.name());
    }
    let mut violations = true;
    for d in [RefDist::Uniform { a: 1.0 }, RefDist::Rademacher { a: 1.0 }] {
        let th3 = th3_lower(d.sigma2()).unwrap();
        let best = ts
            .iter()
            .map(|&t| {
                let f = d.cf(t);
                th3.deficit(t, f).max(th4_deficit(f, d.cf(t / 2.0)))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        violations &= best >= 0.1;
    }
    let u = RefDist::Uniform { a: 1.0 };
    let at_pi = th3_lower(u.sigma2()).unwrap().deficit(PI, u.cf(PI));
    // exp(-π²/6), independent value
    let target = 0.19302528913989804;
    let pass = worst_id <= 1e-12 && violations && (at_pi - target).abs() <= 1e-9;
    check(
        pass,
        format!(
            "ID laws {:?}: max deficit {:.1e}; uniform/rademacher violation >= 0.1: {}; uniform t=pi deficit {:.12}",
            notes, worst_id, violations, at_pi
        ),
    )
}

fn c3_compact() -> Outcome {
    let u = RefDist::Uniform { a: 1.0 };
    let sigma = u.sigma2().sqrt();
    let lower = th1_lower(sigma, 1.0).unwrap();
    let gamma = 2.0;
    // E|U|^{1/2} on [-1, 1] = 1 / (1 + 1/2)
    let upper = th21_upper(2.0 / 3.0, gamma, 1.0).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for &t in &grid_symmetric(lower.validity, 1000) {
        worst = worst.max(lower.deficit(t, u.cf(t)));
    }
    for &t in &grid_symmetric(upper.validity * (1.0 - 1e-12), 1000) {
        worst = worst.max(upper.deficit(t, u.cf(t)));
    }

    let mut eq = 0.0f64;
    let rad = RefDist::Rademacher { a: 1.0 };
    let th1 = th1_lower(1.0, 1.0).unwrap();
    let th21 = th21_upper(1.0, gamma, 1.0).unwrap();
    let bin = RefDist::BinomSym { m: 3, a: 1.0 };
    let th2 = th2_lower(bin.sigma2().sqrt(), 3.0, 3).unwrap();
    for &t in &grid_symmetric(1.5, 301) {
        eq = eq.max(th1.deficit(t, rad.cf(t)).abs());
        eq = eq.max(th21.deficit(t, rad.cf(t)).abs());
        eq = eq.max(th2.deficit(t, bin.cf(t)).abs());
    }
    let pass = worst <= 1e-12 && eq <= 4.0 * f64::EPSILON;
    check(
        pass,
        format!("uniform sandwich worst signed deficit {worst:.3e}; two-point equality max |gap| {eq:.1e}"),
    )
}

fn c4_monotone() -> Outcome {
    let u = RefDist::Uniform { a: 1.0 };
    let sigma = u.sigma2().sqrt();
    let reach = th2_lower(sigma, 1.0, 1).unwrap().validity;
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=100 {
        let t = reach * k as f64 / 100.0;
        let mut prev = f64::NEG_INFINITY;
        for m in 1..=64u32 {
            let c = th2_lower(sigma, 1.0, m).unwrap();
            assert!(c.in_validity(t));
            let v = c.value(t);
            worst = worst.max(prev - v);
            prev = v;
        }
    }
    check(
        worst <= 1e-12,
        format!("largest decrease in m over 100 points: {worst:.1e}"),
    )
}

fn c5_iterate() -> Outcome {
    let d = RefDist::SymPoisson { lambda: 1.0 };
    let sigma2 = d.sigma2();
    let mut worst_gap = 0.0f64;
    let mut monotone = true;
    for t in [0.5, 1.0, 2.0] {
        let seq: Vec<f64> = (0..=12).map(|k| iterate_th4(&d, t, k).unwrap()).collect();
        monotone &= seq.windows(2).all(|w| w[1] <= w[0]);
        worst_gap = worst_gap.max((seq[12] - (-sigma2 * t * t / 2.0).exp()).abs());
    }
    check(
        worst_gap <= 1e-4 && monotone,
        format!("max |iterate_12 - gaussian| = {worst_gap:.2e}, monotone: {monotone}"),
    )
}

fn c6_fractional() -> Outcome {
    let mut worst_two_point = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        for r in [0.25, 0.5, 1.0, 1.5, 1.75] {
            let t_max = 2.0 * PI * 2000.0 / c;
            let h = move |t: f64| (c * t).cos();
            let got = fractional_moment_via_cf(&h, r, t_max, 1e-7).unwrap().value;
            worst_two_point = worst_two_point.max((got - c.powf(r)).abs());
        }
    }
    // E|Z|^r for Z ~ N(0, 1) by direct numerical integration of |x|^r φ(x)
    let oracle = [
        (0.25, 0.882_592_173_385_845_2),
        (0.5, 0.822_178_958_662_458_6),
        (1.0, 0.797_884_560_802_865_4),
        (1.5, 0.860_039_987_324_519_5),
        (1.75, 0.919_783_989_365_155_2),
    ];
    let gauss = |t: f64| (-t * t / 2.0).exp();
    let mut worst_gauss = 0.0f64;
    for (r, want) in oracle {
        let via_cf = fractional_moment_via_cf(&gauss, r, 60.0, 1e-8)
            .unwrap()
            .value;
        let closed = gaussian_abs_moment(1.0, r).unwrap();
        worst_gauss = worst_gauss
            .max((via_cf - want).abs())
            .max((closed - want).abs());
    }
    check(
        worst_two_point <= 1e-6 && worst_gauss <= 1e-6,
        format!("two-point max error {worst_two_point:.1e}; gaussian max error {worst_gauss:.1e}"),
    )
}

fn c7_size() -> Outcome {
    let cfg = TestConfig {
        bootstrap_b: 199,
        alpha: 0.05,
        ..Default::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for dist in ["gaussian", "laplace", "sympoisson"] {
        let rows = power_study(dist, &[500], &cfg, 200).unwrap();
        let combined = rows.iter().find(|r| r.statistic == "combined").unwrap();
        pass &= (0.0..=0.09).contains(&combined.rate);
        parts.push(format!("{dist} {:.3}", combined.rate));
    }
    check(
        pass,
        format!(
            "rejection rates at n=500 over 200 reps: {}",
            parts.join(", ")
        ),
    )
}

fn c8_power() -> Outcome {
    let cfg = TestConfig {
        bootstrap_b: 199,
        alpha: 0.05,
        ..Default::default()
    };
    let ns = [250, 500, 1000, 2000];
    let rows = power_study("uniform", &ns, &cfg, 100).unwrap();
    let rates: Vec<f64> = rows
        .iter()
        .filter(|r| r.statistic == "combined")
        .map(|r| r.rate)
        .collect();
    let monotone = rates.windows(2).all(|w| w[1] >= w[0] - 0.05);
    let top = *rates.last().unwrap();
    check(
        top >= 0.90 && monotone,
        format!("uniform rejection rates over n = {ns:?}: {rates:?}"),
    )
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["infdiv"];
    full.extend_from_slice(args);
    let code = infdiv::cli::run(full, &mut out, &mut err);
    (code, out)
}

fn c9_determinism() -> Outcome {
    let commands: [&[&str]; 6] = [
        &[
            "test",
            "--dist",
            "laplace",
            "--n",
            "300",
            "--seed",
            "9",
            "--stats",
            "t3,t4,tmom",
            "--B",
            "99",
        ],
        &[
            "test", "--dist", "uniform", "--n", "300", "--seed", "9", "--B", "99", "--format",
            "csv",
        ],
        &["bounds", "--dist", "uniform", "--n", "200", "--th", "1a"],
        &[
            "moments",
            "--dist",
            "sympoisson",
            "--n",
            "150",
            "--r",
            "0.5,1",
        ],
        &[
            "simulate", "--dist", "gaussian", "--n", "100,200", "--reps", "6", "--B", "99",
        ],
        &["roots", "--format", "json"],
    ];
    let mut pass = true;
    for cmd in commands {
        let mut outputs = Vec::new();
        for threads in ["1", "3", "1"] {
            let mut args = cmd.to_vec();
            args.extend_from_slice(&["--threads", threads]);
            outputs.push(run_cli(&args));
        }
        pass &= outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].1.is_empty();
    }
    check(
        pass,
        format!(
            "{} commands byte-identical across reruns and --threads 1/3",
            commands.len()
        ),
    )
}

fn c10_ustat() -> Outcome {
    let mut rng = CounterRng::new(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = 2 + rng.below(29);
        let xs: Vec<f64> = (0..n).map(|_| 4.0 * rng.uniform() - 2.0).collect();
        let sample = Sample::new(xs.clone()).unwrap();
        let grid = make_grid(6.0, 25).unwrap();
        let z: Vec<_> = grid
            .points()
            .iter()
            .map(|&t| ecf_point(sample.values(), t))
            .collect();
        let closed = symmetrize_ecf(&z, n).unwrap();
        for (k, &t) in grid.points().iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        acc += (t * (xs[i] - xs[j])).cos();
                    }
                }
            }
            let brute = acc / (n * (n - 1)) as f64;
            worst = worst.max((closed[k] - brute).abs());
        }
    }
    check(
        worst <= 1e-12,
        format!("max |closed form - brute force| = {worst:.1e} over 100 samples"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 root fidelity", c1_root, Duration::from_millis(50)),
        (
            "2 analytic inequality sweeps",
            c2_sweeps,
            Duration::from_secs(1),
        ),
        (
            "3 compact-support bounds",
            c3_compact,
            Duration::from_secs(1),
        ),
        (
            "4 m-divisible monotonicity",
            c4_monotone,
            Duration::from_secs(1),
        ),
        (
            "5 iterated quadrupling limit",
            c5_iterate,
            Duration::from_secs(1),
        ),
        (
            "6 fractional-moment machinery",
            c6_fractional,
            Duration::from_secs(5),
        ),
        ("7 test size", c7_size, Duration::from_secs(300)),
        ("8 test power", c8_power, Duration::from_secs(300)),
        ("9 determinism", c9_determinism, Duration::from_secs(60)),
        ("10 U-statistic oracle", c10_ustat, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (name, f, budget) in criteria {
        let (out, elapsed) = timed(f);
        let pass = out.pass && elapsed <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} [{name}] {} ({:.3?}, budget {:?})",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed,
            budget
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failures,
        failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
