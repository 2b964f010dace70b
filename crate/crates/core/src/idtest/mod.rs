//! Bootstrap-calibrated test of infinite divisibility.
//!
//! A rejection is conclusive evidence against infinite divisibility. A
//! non-rejection is not evidence for it: every condition checked here is
//! only necessary.

mod bootstrap;
pub mod power;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::cf_core::{make_grid, CurveMode, Sample, TGrid};
use crate::error::{invalid, Result};
use bootstrap::{bootstrap_p, critical_value, Engine, EngineParams};

pub use power::{power_study, PowerRow};
pub use stats::{
    rademacher_difference_moment, stat_t2, stat_t3, stat_t3_ecf, stat_t4, stat_t4_ecf, stat_tmom,
    stat_tmom_direct, t2_deficits, t2_indices, t3_deficits, t4_deficits, t4_pairs, DeficitStat,
    TmomStat,
};

pub const REPORT_SCHEMA: u32 = 1;
/// Default grid reach in units of `1 / σ̂`.
pub const DEFAULT_GRID_SCALE: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    T3,
    T4,
    Tmom,
    T2,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::T3 => "t3",
            Statistic::T4 => "t4",
            Statistic::Tmom => "tmom",
            Statistic::T2 => "t2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t3" => Ok(Statistic::T3),
            "t4" => Ok(Statistic::T4),
            "tmom" => Ok(Statistic::Tmom),
            "t2" => Ok(Statistic::T2),
            other => invalid(format!(
                "unknown statistic '{other}' (expected t3, t4, tmom, t2)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// `None` selects `8 / σ̂` from the data.
    pub grid_t_max: Option<f64>,
    pub grid_points: usize,
    pub statistics: Vec<Statistic>,
    pub r_order: f64,
    pub bootstrap_b: usize,
    pub alpha: f64,
    pub seed: u64,
    /// Adds the m-divisibility statistic T2.
    pub m_hypothesis: Option<u32>,
    /// Treat the data as already symmetric about 0 and skip symmetrization.
    pub symmetric: bool,
    /// Support radius for T2; estimated from the data when absent.
    pub support_radius: Option<f64>,
    /// Cap on pairwise differences used by TMOM.
    pub max_pairs: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            grid_t_max: None,
            grid_points: 256,
            statistics: vec![Statistic::T3, Statistic::T4],
            r_order: 1.0,
            bootstrap_b: 199,
            alpha: 0.05,
            seed: 42,
            m_hypothesis: None,
            symmetric: false,
            support_radius: None,
            max_pairs: 20_000,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bootstrap_b < 99 {
            return invalid(format!(
                "bootstrap B must be at least 99, got {}",
                self.bootstrap_b
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return invalid(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if let Some(t) = self.grid_t_max {
            if !(t.is_finite() && t > 0.0) {
                return invalid(format!("grid t_max must be finite and positive, got {t}"));
            }
        }
        if self.grid_points < 3 {
            return invalid("grid needs at least 3 points");
        }
        if self.statistics.is_empty() && self.m_hypothesis.is_none() {
            return invalid("no statistic selected");
        }
        if self.statistics.contains(&Statistic::Tmom) && !(self.r_order > 0.0 && self.r_order < 2.0)
        {
            return invalid(format!("order r must lie in (0, 2), got {}", self.r_order));
        }
        match self.m_hypothesis {
            Some(0) => return invalid("m must be a positive integer"),
            None if self.statistics.contains(&Statistic::T2) => {
                return invalid("statistic t2 requires an m hypothesis");
            }
            _ => {}
        }
        if let Some(a) = self.support_radius {
            if !(a.is_finite() && a > 0.0) {
                return invalid(format!(
                    "support radius must be finite and positive, got {a}"
                ));
            }
        }
        if self.max_pairs == 0 {
            return invalid("max_pairs must be positive");
        }
        Ok(())
    }

    /// Enabled statistics in evaluation order, T2 appended under an m hypothesis.
    pub fn enabled(&self) -> Vec<Statistic> {
        let mut out: Vec<Statistic> = Vec::new();
        for &s in &self.statistics {
            if !out.contains(&s) {
                out.push(s);
            }
        }
        if self.m_hypothesis.is_some() && !out.contains(&Statistic::T2) {
            out.push(Statistic::T2);
        }
        out
    }

    fn curve_mode(&self) -> CurveMode {
        if self.symmetric {
            CurveMode::Direct
        } else {
            CurveMode::Symmetrized
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    RejectId,
    NoEvidenceAgainstId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticResult {
    pub statistic: Statistic,
    pub observed: f64,
    pub p_value: f64,
    /// Bonferroni-adjusted: `min(1, K p)`.
    pub adjusted_p_value: f64,
    /// Upper `alpha / K` quantile of the recentered bootstrap values.
    pub critical_value: f64,
    pub argmax_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitTrace {
    pub statistic: Statistic,
    pub t: Vec<f64>,
    pub deficit: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmomDetail {
    pub sample_moment: f64,
    pub gaussian_bound: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub deficits: Vec<DeficitTrace>,
    pub tmom: Option<TmomDetail>,
    pub t2_support_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema: u32,
    pub n: usize,
    /// `symmetrized` or `direct`.
    pub mode: String,
    /// Variance the Gaussian envelopes use (`2 s²` when symmetrized).
    pub sigma2: f64,
    pub grid_t_max: f64,
    pub grid_points: usize,
    pub config: TestConfig,
    pub statistics: Vec<StatisticResult>,
    pub decision: Decision,
    pub conclusion: String,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

impl TestReport {
    pub fn min_adjusted_p(&self) -> f64 {
        self.statistics
            .iter()
            .map(|s| s.adjusted_p_value)
            .fold(1.0, f64::min)
    }
}

fn conclusion(decision: Decision) -> String {
    match decision {
        Decision::RejectId => {
            "A necessary condition for infinite divisibility is violated: the sample is evidence against an infinitely divisible law."
        }
        Decision::NoEvidenceAgainstId => {
            "No necessary condition was violated at this level. This does not show that the law is infinitely divisible."
        }
    }
    .to_string()
}

/// Decision rule on the Bonferroni-adjusted p-values.
pub fn decide(results: &[StatisticResult], alpha: f64) -> Decision {
    if results.iter().any(|r| r.adjusted_p_value < alpha) {
        Decision::RejectId
    } else {
        Decision::NoEvidenceAgainstId
    }
}

/// Nonparametric bootstrap p-value of one statistic.
///
/// Returns `(p_value, critical_value at alpha, recentered bootstrap values)`.
pub fn bootstrap_pvalue(
    sample: &Sample,
    statistic: Statistic,
    config: &TestConfig,
) -> Result<(f64, f64, Vec<f64>)> {
    let cfg = TestConfig {
        statistics: vec![statistic],
        m_hypothesis: if statistic == Statistic::T2 {
            config.m_hypothesis
        } else {
            None
        },
        ..config.clone()
    };
    cfg.validate()?;
    let prepared = prepare(sample, &cfg)?;
    let Some(prep) = prepared else {
        return Ok((1.0, 0.0, vec![0.0; cfg.bootstrap_b]));
    };
    let run = prep.engine(sample, &cfg).run(cfg.bootstrap_b)?;
    let observed = stats::positive_max(&run.observed.deficits[0]);
    let boot = run.boot.into_iter().next().unwrap_or_default();
    Ok((
        bootstrap_p(observed, &boot),
        critical_value(&boot, cfg.alpha),
        boot,
    ))
}

struct Prepared {
    grid: TGrid,
    mode: CurveMode,
    stats: Vec<Statistic>,
    t4_pairs: Vec<(usize, usize)>,
    t2: Option<(u32, Vec<usize>)>,
    t2_radius: Option<f64>,
    sigma2: f64,
    warnings: Vec<String>,
}

impl Prepared {
    fn engine<'a>(&'a self, sample: &'a Sample, cfg: &TestConfig) -> Engine<'a> {
        Engine::new(EngineParams {
            sample,
            mode: self.mode,
            grid: &self.grid,
            stats: self.stats.clone(),
            r_order: cfg.r_order,
            max_pairs: cfg.max_pairs,
            t4_pairs: self.t4_pairs.clone(),
            t2: self.t2.clone(),
            seed: cfg.seed,
        })
    }
}

/// Grid and index sets fixed from the observed data. `None` for a
/// zero-variance sample.
fn prepare(sample: &Sample, cfg: &TestConfig) -> Result<Option<Prepared>> {
    sample.require_estimable()?;
    let variance = sample.variance()?;
    if variance == 0.0 {
        return Ok(None);
    }
    let mode = cfg.curve_mode();
    let sigma2 = match mode {
        CurveMode::Symmetrized => 2.0 * variance,
        CurveMode::Direct => variance,
    };
    let t_max = cfg.grid_t_max.unwrap_or(DEFAULT_GRID_SCALE / sigma2.sqrt());
    let grid = make_grid(t_max, cfg.grid_points)?;
    let stats = cfg.enabled();
    let mut warnings = Vec::new();

    let t4_pairs = if stats.contains(&Statistic::T4) {
        t4_pairs(&grid)?
    } else {
        Vec::new()
    };

    let (t2, t2_radius) = match cfg.m_hypothesis {
        Some(m) => {
            let radius = match cfg.support_radius {
                Some(a) => a,
                None => {
                    warnings.push("t2 support radius estimated from the sample range".into());
                    match mode {
                        CurveMode::Symmetrized => sample.max() - sample.min(),
                        CurveMode::Direct => sample.max().abs().max(sample.min().abs()),
                    }
                }
            };
            let idx = t2_indices(&grid, sigma2.sqrt(), radius, m)?;
            if idx.len() <= 1 {
                warnings.push("t2 validity interval contains no positive grid point".into());
            }
            (Some((m, idx)), Some(radius))
        }
        None => (None, None),
    };

    Ok(Some(Prepared {
        grid,
        mode,
        stats,
        t4_pairs,
        t2,
        t2_radius,
        sigma2,
        warnings,
    }))
}

fn mode_name(mode: CurveMode) -> String {
    match mode {
        CurveMode::Symmetrized => "symmetrized",
        CurveMode::Direct => "direct",
    }
    .to_string()
}

fn degenerate_report(sample: &Sample, cfg: &TestConfig) -> TestReport {
    let statistics = cfg
        .enabled()
        .into_iter()
        .map(|statistic| StatisticResult {
            statistic,
            observed: 0.0,
            p_value: 1.0,
            adjusted_p_value: 1.0,
            critical_value: 0.0,
            argmax_t: None,
        })
        .collect();
    let decision = Decision::NoEvidenceAgainstId;
    TestReport {
        schema: REPORT_SCHEMA,
        n: sample.n(),
        mode: mode_name(cfg.curve_mode()),
        sigma2: 0.0,
        grid_t_max: 0.0,
        grid_points: 0,
        config: cfg.clone(),
        statistics,
        decision,
        conclusion: conclusion(decision),
        diagnostics: Diagnostics {
            deficits: Vec::new(),
            tmom: None,
            t2_support_radius: None,
        },
        warnings: vec!["sample has zero variance; all statistics set to 0".into()],
    }
}

/// Runs every enabled statistic with its bootstrap p-value and combines them
/// by Bonferroni.
pub fn run_test(sample: &Sample, config: &TestConfig) -> Result<TestReport> {
    config.validate()?;
    let Some(prep) = prepare(sample, config)? else {
        return Ok(degenerate_report(sample, config));
    };
    let mut warnings = prep.warnings.clone();
    let run = prep.engine(sample, config).run(config.bootstrap_b)?;
    let k = prep.stats.len() as f64;
    let level = config.alpha / k;

    let h = run.observed.ecf.curve(prep.mode);
    if prep.stats.contains(&Statistic::T4) {
        let clamped = prep
            .t4_pairs
            .iter()
            .filter(|&&(_, j)| !(0.0..=1.0).contains(&h[j]))
            .count();
        if clamped > 0 {
            warnings.push(format!(
                "t4: {clamped} half-point curve values clamped to [0, 1] before the fourth power"
            ));
        }
    }

    let points = prep.grid.points();
    let mut results = Vec::new();
    let mut traces = Vec::new();
    let mut tmom = None;
    for (s, &statistic) in prep.stats.iter().enumerate() {
        let deficits = &run.observed.deficits[s];
        let observed = stats::positive_max(deficits);
        let boot = &run.boot[s];
        let p_value = bootstrap_p(observed, boot);
        let trace_t: Option<Vec<f64>> = match statistic {
            Statistic::T3 => Some(points.to_vec()),
            Statistic::T4 => Some(prep.t4_pairs.iter().map(|&(k, _)| points[k]).collect()),
            Statistic::T2 => prep
                .t2
                .as_ref()
                .map(|(_, idx)| idx.iter().map(|&k| points[k]).collect()),
            Statistic::Tmom => None,
        };
        let argmax_t = trace_t.as_ref().and_then(|ts| {
            deficits
                .iter()
                .zip(ts)
                .fold(None, |best: Option<(f64, f64)>, (&d, &t)| match best {
                    Some((bd, _)) if bd >= d => best,
                    _ => Some((d, t)),
                })
                .map(|(_, t)| t)
        });
        if let Some(t) = trace_t {
            traces.push(DeficitTrace {
                statistic,
                t,
                deficit: deficits.clone(),
            });
        }
        if statistic == Statistic::Tmom {
            let detail = match prep.mode {
                CurveMode::Symmetrized => stats::stat_tmom(
                    sample,
                    config.r_order,
                    config.max_pairs,
                    pair_seed_for_report(config.seed),
                )?,
                CurveMode::Direct => stats::stat_tmom_direct(sample, config.r_order)?,
            };
            tmom = Some(TmomDetail {
                sample_moment: detail.sample_moment,
                gaussian_bound: detail.gaussian_bound,
                sigma: detail.sigma,
            });
        }
        results.push(StatisticResult {
            statistic,
            observed,
            p_value,
            adjusted_p_value: (k * p_value).min(1.0),
            critical_value: critical_value(boot, level),
            argmax_t,
        });
    }

    let decision = decide(&results, config.alpha);
    Ok(TestReport {
        schema: REPORT_SCHEMA,
        n: sample.n(),
        mode: mode_name(prep.mode),
        sigma2: prep.sigma2,
        grid_t_max: prep.grid.t_max(),
        grid_points: prep.grid.len(),
        config: config.clone(),
        statistics: results,
        decision,
        conclusion: conclusion(decision),
        diagnostics: Diagnostics {
            deficits: traces,
            tmom,
            t2_support_radius: prep.t2_radius,
        },
        warnings,
    })
}

/// Seed the engine uses for the observed pairwise-difference subsample.
fn pair_seed_for_report(seed: u64) -> u64 {
    bootstrap::observed_pair_seed(seed)
}
