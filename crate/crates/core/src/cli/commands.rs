use std::fmt::Write as _;
use std::io::Read;

use serde::Serialize;

use super::csv::{read_column, ColumnSel};
use super::{
    BoundsArgs, Format, MomentsArgs, Outcome, RootsArgs, SimulateArgs, SourceArgs, TestArgs,
    TestFlags, BoundKind,
};
use super::{EXIT_OK, EXIT_REJECT};
use crate::bounds::{
    fractional_moment_via_cf, gaussian_abs_moment, root_z0, th1_lower, th1a_lower, th21_upper,
    th2_lower, th2a_lower, th3_lower, th4_deficit, BoundCurve, CharFn,
};
use crate::cf_core::{
    abs_moment, ecf_point, make_grid, moments, pairwise_difference_sample, MomentSet, Sample,
};
use crate::error::{invalid, Error, Result};
use crate::idtest::{
    power_study, run_test, stat_tmom, stat_tmom_direct, Decision, PowerRow, Statistic, TestConfig,
};
use crate::refdist::RefDist;

/// Smallest sample the `test` command accepts.
pub const MIN_TEST_N: usize = 20;
const BOUNDS_MAX_PAIRS: usize = 20_000;

enum Source {
    Analytic(RefDist),
    Data {
        sample: Sample,
        dist: Option<RefDist>,
    },
}

fn read_input(path: &std::path::Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Error::Io(format!("stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_source(args: &SourceArgs, allow_analytic: bool) -> Result<Source> {
    match (&args.input, &args.dist) {
        (Some(_), Some(_)) => invalid("use either --input or --dist, not both"),
        (None, None) => invalid("a data source is required: --input FILE or --dist NAME"),
        (Some(path), None) => {
            if args.n.is_some() {
                return invalid("--n applies only to --dist");
            }
            let column = args.column.as_deref().map(ColumnSel::parse);
            let values = read_column(&read_input(path)?, column.as_ref())?;
            Ok(Source::Data {
                sample: Sample::new(values)?,
                dist: None,
            })
        }
        (None, Some(name)) => {
            if args.column.is_some() {
                return invalid("--column applies only to --input");
            }
            let dist = RefDist::by_name(name)?;
            match args.n {
                Some(n) => Ok(Source::Data {
                    sample: dist.sample(n, args.seed)?,
                    dist: Some(dist),
                }),
                None if allow_analytic => Ok(Source::Analytic(dist)),
                None => invalid("--dist needs --n for this command"),
            }
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .or_else(|_| invalid(format!("cannot parse {what} '{p}'")))
        })
        .collect()
}

fn test_config(flags: &TestFlags, seed: u64) -> Result<TestConfig> {
    let statistics = flags
        .stats
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Statistic::parse)
        .collect::<Result<Vec<_>>>()?;
    let cfg = TestConfig {
        grid_t_max: flags.grid_max,
        grid_points: flags.grid_points,
        statistics,
        r_order: flags.r,
        bootstrap_b: flags.bootstrap_b,
        alpha: flags.alpha,
        seed,
        m_hypothesis: flags.m,
        symmetric: flags.symmetric,
        support_radius: flags.support_radius,
        max_pairs: flags.max_pairs,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s =
        serde_json::to_string_pretty(value).map_err(|e| Error::NumericFailure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn cmd_test(args: &TestArgs) -> Result<Outcome> {
    let cfg = test_config(&args.test, args.source.seed)?;
    let sample = match load_source(&args.source, false)? {
        Source::Data { sample, .. } => sample,
        Source::Analytic(_) => unreachable!("analytic source disabled"),
    };
    if sample.n() < MIN_TEST_N {
        return Err(Error::DataSet(format!(
            "need at least {MIN_TEST_N} observations, got {}",
            sample.n()
        )));
    }
    let report = run_test(&sample, &cfg)?;
    let text = match args.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let decision = match report.decision {
                Decision::RejectId => "REJECT_ID",
                Decision::NoEvidenceAgainstId => "NO_EVIDENCE_AGAINST_ID",
            };
            let mut s = String::from(
                "statistic,observed,p_value,adjusted_p_value,critical_value,argmax_t,decision\n",
            );
            for r in &report.statistics {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.statistic.name(),
                    r.observed,
                    r.p_value,
                    r.adjusted_p_value,
                    r.critical_value,
                    opt(r.argmax_t),
                    decision
                );
            }
            s
        }
    };
    let code = if report.decision == Decision::RejectId {
        EXIT_REJECT
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        text,
        code,
        warnings: Vec::new(),
    })
}

/// The variable the bounds are checked on: a registry law, or the
/// (symmetrized) empirical law of a sample.
struct Target {
    source: &'static str,
    eval: Box<dyn Fn(f64) -> f64 + Sync>,
    sigma2: f64,
    support: Option<f64>,
    dist: Option<RefDist>,
    /// Draws of the analyzed variable, for moment estimates.
    values: Option<Sample>,
}

impl Target {
    fn new(
        source: Source,
        symmetric: bool,
        support_flag: Option<f64>,
        seed: u64,
        max_pairs: usize,
    ) -> Result<Self> {
        match source {
            Source::Analytic(dist) => {
                dist.validate()?;
                Ok(Target {
                    source: "cf",
                    eval: Box::new(move |t| dist.cf(t)),
                    sigma2: dist.sigma2(),
                    support: support_flag.or(dist.support_radius()),
                    dist: Some(dist),
                    values: None,
                })
            }
            Source::Data { sample, dist } => {
                sample.require_estimable()?;
                let variance = sample.variance()?;
                let xs = sample.values().to_vec();
                if symmetric {
                    Ok(Target {
                        source: "ecf",
                        eval: Box::new(move |t| ecf_point(&xs, t).re),
                        sigma2: variance,
                        support: support_flag.or(dist.and_then(|d| d.support_radius())),
                        dist: None,
                        values: Some(sample),
                    })
                } else {
                    let n = xs.len() as f64;
                    let diffs = pairwise_difference_sample(&sample, max_pairs, seed)?;
                    Ok(Target {
                        source: "ecf",
                        eval: Box::new(move |t| {
                            (n * ecf_point(&xs, t).norm_sqr() - 1.0) / (n - 1.0)
                        }),
                        sigma2: 2.0 * variance,
                        support: support_flag
                            .or(dist.and_then(|d| d.support_radius()).map(|a| 2.0 * a)),
                        dist: None,
                        values: Some(diffs),
                    })
                }
            }
        }
    }

    fn moment_set(&self, extra: &[f64]) -> Result<MomentSet> {
        match (&self.dist, &self.values) {
            (Some(d), _) => d.moment_set(extra),
            (None, Some(v)) => moments(v, extra, false),
            (None, None) => invalid("no moments available"),
        }
    }

    fn abs_moment(&self, r: f64) -> f64 {
        match (&self.dist, &self.values) {
            (Some(d), _) => d.abs_moment(r),
            (None, Some(v)) => abs_moment(v.values(), 0.0, r),
            (None, None) => f64::NAN,
        }
    }

    fn require_support(&self, th: &str) -> Result<f64> {
        self.support.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "bound {th} needs --support-radius or a compactly supported --dist"
            ))
        })
    }
}

impl CharFn for Target {
    fn cf(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

#[derive(Serialize)]
struct BoundRow {
    t: f64,
    ecf_or_cf: f64,
    bound: f64,
    deficit: f64,
    in_validity: bool,
}

#[derive(Serialize)]
struct BoundsReport {
    bound: &'static str,
    source: &'static str,
    sigma2: f64,
    support_radius: Option<f64>,
    /// Half-width of the validity interval, `None` when unrestricted.
    validity: Option<f64>,
    heuristic: bool,
    clamped: bool,
    rows: Vec<BoundRow>,
}

fn bound_name(th: BoundKind) -> &'static str {
    match th {
        BoundKind::Th1 => "1",
        BoundKind::Th1a => "1a",
        BoundKind::Th2 => "2",
        BoundKind::Th2a => "2a",
        BoundKind::Th3 => "3",
        BoundKind::Th4 => "4",
        BoundKind::Th21 => "21",
    }
}

pub(crate) fn cmd_bounds(args: &BoundsArgs) -> Result<Outcome> {
    let name = bound_name(args.th);
    if matches!(args.th, BoundKind::Th2 | BoundKind::Th2a) && args.m.is_none() {
        return invalid(format!("bound {name} needs --m"));
    }
    let target = Target::new(
        load_source(&args.source, true)?,
        args.symmetric,
        args.support_radius,
        args.source.seed,
        BOUNDS_MAX_PAIRS,
    )?;
    if !(target.sigma2 > 0.0) {
        return Err(Error::DataSet(
            "variance is zero; bounds are degenerate".into(),
        ));
    }
    let sigma = target.sigma2.sqrt();
    let curve: Option<BoundCurve> = match args.th {
        BoundKind::Th1 => Some(th1_lower(sigma, target.require_support(name)?)?),
        BoundKind::Th1a => Some(th1a_lower(&target.moment_set(&[])?)?),
        BoundKind::Th2 => Some(th2_lower(
            sigma,
            target.require_support(name)?,
            args.m.unwrap_or(1),
        )?),
        BoundKind::Th2a => Some(th2a_lower(&target.moment_set(&[])?, args.m.unwrap_or(1))?),
        BoundKind::Th3 => Some(th3_lower(target.sigma2)?),
        BoundKind::Th4 => None,
        BoundKind::Th21 => {
            let a = target.require_support(name)?;
            if !(args.gamma > 1.0) {
                return invalid(format!("--gamma must exceed 1, got {}", args.gamma));
            }
            Some(th21_upper(
                target.abs_moment(1.0 / args.gamma),
                args.gamma,
                a,
            )?)
        }
    };

    let t_max = args.grid_max.unwrap_or(8.0 / sigma);
    let grid = make_grid(t_max, args.grid_points)?;
    let rows: Vec<BoundRow> = grid
        .points()
        .iter()
        .map(|&t| {
            let f = target.cf(t);
            let (bound, deficit, in_validity) = match &curve {
                Some(c) => (c.value(t), c.deficit(t, f), c.in_validity(t)),
                None => {
                    let half = target.cf(t / 2.0);
                    (half.clamp(0.0, 1.0).powi(4), th4_deficit(f, half), true)
                }
            };
            BoundRow {
                t,
                ecf_or_cf: f,
                bound,
                deficit,
                in_validity,
            }
        })
        .collect();

    let mut warnings = Vec::new();
    let (validity, heuristic, clamped) = match &curve {
        Some(c) => (
            Some(c.validity).filter(|v| v.is_finite()),
            c.heuristic,
            c.clamped,
        ),
        None => (None, false, false),
    };
    if heuristic {
        warnings.push(format!("bound {name}: validity radius is heuristic"));
    }
    if clamped {
        warnings.push(format!(
            "bound {name}: negative radius estimate clamped to 0"
        ));
    }

    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("t,ecf_or_cf,bound,deficit,in_validity\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.t, r.ecf_or_cf, r.bound, r.deficit, r.in_validity
                );
            }
            s
        }
        Format::Json => to_json(&BoundsReport {
            bound: name,
            source: target.source,
            sigma2: target.sigma2,
            support_radius: target.support,
            validity,
            heuristic,
            clamped,
            rows,
        })?,
    };
    Ok(Outcome {
        text,
        code: EXIT_OK,
        warnings,
    })
}

#[derive(Serialize)]
struct MomentRow {
    r: f64,
    /// Absolute moment of the analyzed variable.
    moment: f64,
    gaussian_bound: f64,
    tmom: f64,
    /// The same moment recovered from the characteristic function.
    cr_check: f64,
    cr_tail_bound: f64,
}

/// Integration reach for the characteristic-function cross-check, in units of `1 / σ`.
const CR_REACH_ANALYTIC: f64 = 2000.0;
const CR_REACH_DATA: f64 = 100.0;

pub(crate) fn cmd_moments(args: &MomentsArgs) -> Result<Outcome> {
    let orders: Vec<f64> = parse_list(&args.r, "order")?;
    if orders.is_empty() {
        return invalid("--r needs at least one order");
    }
    if let Some(r) = orders.iter().find(|r| !(**r > 0.0 && **r < 2.0)) {
        return invalid(format!("order r must lie in (0, 2), got {r}"));
    }
    if args.max_pairs == 0 {
        return invalid("--max-pairs must be positive");
    }
    let source = load_source(&args.source, true)?;
    let mut rows = Vec::new();
    match &source {
        Source::Analytic(dist) => {
            dist.validate()?;
            let sigma = dist.sigma2().sqrt();
            for &r in &orders {
                let moment = dist.abs_moment(r);
                let bound = gaussian_abs_moment(sigma, r)?;
                let cr = fractional_moment_via_cf(dist, r, CR_REACH_ANALYTIC / sigma, 1e-8)?;
                rows.push(MomentRow {
                    r,
                    moment,
                    gaussian_bound: bound,
                    tmom: (moment - bound).max(0.0),
                    cr_check: cr.value,
                    cr_tail_bound: cr.tail_bound,
                });
            }
        }
        Source::Data { sample, .. } => {
            sample.require_estimable()?;
            if sample.variance()? == 0.0 {
                return Err(Error::DataSet(
                    "variance is zero; moments are degenerate".into(),
                ));
            }
            let target = Target::new(
                Source::Data {
                    sample: sample.clone(),
                    dist: None,
                },
                args.symmetric,
                None,
                args.source.seed,
                args.max_pairs,
            )?;
            let reach = CR_REACH_DATA / target.sigma2.sqrt();
            for &r in &orders {
                let tm = if args.symmetric {
                    stat_tmom_direct(sample, r)?
                } else {
                    stat_tmom(sample, r, args.max_pairs, args.source.seed)?
                };
                let cr = fractional_moment_via_cf(&target, r, reach, 1e-6)?;
                rows.push(MomentRow {
                    r,
                    moment: tm.sample_moment,
                    gaussian_bound: tm.gaussian_bound,
                    tmom: tm.value,
                    cr_check: cr.value,
                    cr_tail_bound: cr.tail_bound,
                });
            }
        }
    }
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("r,moment,gaussian_bound,tmom,cr_check,cr_tail_bound\n");
            for m in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    m.r, m.moment, m.gaussian_bound, m.tmom, m.cr_check, m.cr_tail_bound
                );
            }
            s
        }
        Format::Json => to_json(&rows)?,
    };
    Ok(Outcome {
        text,
        code: EXIT_OK,
        warnings: Vec::new(),
    })
}

pub(crate) fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let cfg = test_config(&args.test, args.seed)?;
    let n_list: Vec<usize> = parse_list(&args.n, "sample size")?;
    if let Some(n) = n_list.iter().find(|&&n| n < MIN_TEST_N) {
        return invalid(format!(
            "sample sizes must be at least {MIN_TEST_N}, got {n}"
        ));
    }
    let rows = power_study(&args.dist, &n_list, &cfg, args.reps)?;
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!("{}\n", PowerRow::CSV_HEADER);
            for r in &rows {
                s.push_str(&r.csv_line());
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(&rows)?,
    };
    Ok(Outcome {
        text,
        code: EXIT_OK,
        warnings: Vec::new(),
    })
}

pub(crate) fn cmd_roots(args: &RootsArgs) -> Result<Outcome> {
    let root = root_z0();
    let text = match args.out.format.unwrap_or(Format::Csv) {
        Format::Csv => format!(
            "z0,residual,iterations\n{:.12},{:e},{}\n",
            root.value, root.residual, root.iterations
        ),
        Format::Json => to_json(&root)?,
    };
    Ok(Outcome {
        text,
        code: EXIT_OK,
        warnings: Vec::new(),
    })
}
