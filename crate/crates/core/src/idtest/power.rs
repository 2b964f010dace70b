//! Monte Carlo rejection rates for registry distributions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_test, Decision, TestConfig};
use crate::error::Result;
use crate::refdist::RefDist;
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub dist: String,
    pub n: usize,
    /// A statistic name, or `combined` for the Bonferroni decision.
    pub statistic: String,
    pub reps: usize,
    pub rejections: usize,
    pub rate: f64,
    /// Binomial standard error `sqrt(rate (1 - rate) / reps)`.
    pub mc_se: f64,
}

impl PowerRow {
    pub const CSV_HEADER: &'static str = "dist,n,statistic,reps,rejections,rate,mc_se";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.dist, self.n, self.statistic, self.reps, self.rejections, self.rate, self.mc_se
        )
    }
}

/// `(sample seed, bootstrap seed)` for repetition `rep` at size `n`.
fn rep_seeds(master: u64, n: usize, rep: usize) -> (u64, u64) {
    let base = CounterRng::new(master).stream_path(&[n as u64, rep as u64]);
    (base.stream(0).next_u64(), base.stream(1).next_u64())
}

/// Rejection-rate table over `n_list × statistics`, one `combined` row per `n`.
pub fn power_study(
    dist_name: &str,
    n_list: &[usize],
    config: &TestConfig,
    reps: usize,
) -> Result<Vec<PowerRow>> {
    let dist = RefDist::by_name(dist_name)?;
    dist.validate()?;
    config.validate()?;
    let mut rows = Vec::new();
    if reps == 0 {
        return Ok(rows);
    }
    let stats = config.enabled();
    for &n in n_list {
        let outcomes: Vec<(Vec<bool>, bool)> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let (sample_seed, test_seed) = rep_seeds(config.seed, n, rep);
                let sample = dist.sample(n, sample_seed)?;
                let cfg = TestConfig {
                    seed: test_seed,
                    ..config.clone()
                };
                let report = run_test(&sample, &cfg)?;
                let per = report
                    .statistics
                    .iter()
                    .map(|s| s.adjusted_p_value < config.alpha)
                    .collect();
                Ok((per, report.decision == Decision::RejectId))
            })
            .collect::<Result<_>>()?;

        let mut push = |statistic: &str, rejections: usize| {
            let rate = rejections as f64 / reps as f64;
            rows.push(PowerRow {
                dist: dist.name().to_string(),
                n,
                statistic: statistic.to_string(),
                reps,
                rejections,
                rate,
                mc_se: (rate * (1.0 - rate) / reps as f64).sqrt(),
            });
        };
        for (s, stat) in stats.iter().enumerate() {
            push(
                stat.name(),
                outcomes.iter().filter(|(per, _)| per[s]).count(),
            );
        }
        push("combined", outcomes.iter().filter(|(_, c)| *c).count());
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idtest::Statistic;

    #[test]
    fn zero_reps_is_empty() {
        let rows = power_study("gaussian", &[100], &TestConfig::default(), 0).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn unknown_dist_rejected() {
        assert!(power_study("cauchy", &[100], &TestConfig::default(), 1).is_err());
    }

    #[test]
    fn rows_shape_and_determinism() {
        let cfg = TestConfig {
            statistics: vec![Statistic::T3],
            bootstrap_b: 99,
            ..Default::default()
        };
        let a = power_study("uniform", &[200, 400], &cfg, 4).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a[1].statistic, "combined");
        assert_eq!(a, power_study("uniform", &[200, 400], &cfg, 4).unwrap());
        for r in &a {
            assert!(r.rejections <= r.reps);
            assert!(r.mc_se >= 0.0);
        }
    }
}
