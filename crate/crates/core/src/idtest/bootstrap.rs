//! Recentered nonparametric bootstrap for the deficit statistics.
//!
//! Replicate `b` draws its resample from stream `b` of the master seed, so
//! the bootstrap distribution does not depend on how replicates are
//! scheduled across threads.

use rayon::prelude::*;

use super::stats::{positive_max, t2_deficits, t3_deficits, t4_deficits, tmom_from_values};
use super::Statistic;
use crate::bounds::gaussian_abs_moment;
use crate::cf_core::{ecf, pairwise_difference_sample, CurveMode, EmpiricalCF, Sample, TGrid};
use crate::error::Result;
use crate::rng::CounterRng;

const BOOT_STREAM: u64 = 0xB007;
const PAIR_STREAM: u64 = 0x9A1E;
/// Largest `n * grid` for which `cos(t_k x_j)` and `sin(t_k x_j)` are cached.
const TABLE_LIMIT: usize = 1 << 22;

/// Precomputed `cos(t_k x_j)` / `sin(t_k x_j)`, row-major in `j`.
struct EcfTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

pub(crate) struct Engine<'a> {
    values: &'a [f64],
    mode: CurveMode,
    grid: &'a TGrid,
    stats: Vec<Statistic>,
    r_order: f64,
    max_pairs: usize,
    t4_pairs: Vec<(usize, usize)>,
    t2: Option<(u32, Vec<usize>)>,
    master: CounterRng,
    table: Option<EcfTable>,
}

pub(crate) struct Observed {
    pub ecf: EmpiricalCF,
    pub deficits: Vec<Vec<f64>>,
}

pub(crate) struct BootRun {
    pub observed: Observed,
    /// `boot[s][b]`: recentered replicate statistic for statistic `s`.
    pub boot: Vec<Vec<f64>>,
}

pub(crate) struct EngineParams<'a> {
    pub sample: &'a Sample,
    pub mode: CurveMode,
    pub grid: &'a TGrid,
    pub stats: Vec<Statistic>,
    pub r_order: f64,
    pub max_pairs: usize,
    pub t4_pairs: Vec<(usize, usize)>,
    pub t2: Option<(u32, Vec<usize>)>,
    pub seed: u64,
}

impl<'a> Engine<'a> {
    pub fn new(spec: EngineParams<'a>) -> Self {
        let values = spec.sample.values();
        let g = spec.grid.len();
        let table = (values.len() * g <= TABLE_LIMIT).then(|| {
            let mut cos = Vec::with_capacity(values.len() * g);
            let mut sin = Vec::with_capacity(values.len() * g);
            for &x in values {
                for &t in spec.grid.points() {
                    let (s, c) = (t * x).sin_cos();
                    cos.push(c);
                    sin.push(s);
                }
            }
            EcfTable { cos, sin }
        });
        Self {
            values,
            mode: spec.mode,
            grid: spec.grid,
            stats: spec.stats,
            r_order: spec.r_order,
            max_pairs: spec.max_pairs,
            t4_pairs: spec.t4_pairs,
            t2: spec.t2,
            master: CounterRng::new(spec.seed),
            table,
        }
    }

    fn analyzed_sigma2(&self, variance: f64) -> f64 {
        match self.mode {
            CurveMode::Symmetrized => 2.0 * variance,
            CurveMode::Direct => variance,
        }
    }

    fn pair_seed(&self, replicate: Option<usize>) -> u64 {
        let id = replicate.map_or(0, |b| b as u64 + 1);
        self.master.stream_path(&[PAIR_STREAM, id]).next_u64()
    }

    fn evaluate(
        &self,
        h: &[f64],
        sigma2: f64,
        data: &[f64],
        pair_seed: u64,
    ) -> Result<Vec<Vec<f64>>> {
        let points = self.grid.points();
        self.stats
            .iter()
            .map(|stat| {
                Ok(match stat {
                    Statistic::T3 => t3_deficits(points, h, sigma2),
                    Statistic::T4 => t4_deficits(h, &self.t4_pairs),
                    Statistic::T2 => {
                        let (m, idx) = self.t2.as_ref().expect("T2 needs an m hypothesis");
                        t2_deficits(points, h, idx, sigma2.sqrt(), *m)
                    }
                    Statistic::Tmom => {
                        let tm = match self.mode {
                            CurveMode::Symmetrized => {
                                let s = Sample::new(data.to_vec())?;
                                let diffs =
                                    pairwise_difference_sample(&s, self.max_pairs, pair_seed)?;
                                tmom_from_values(diffs.values(), self.r_order)?
                            }
                            CurveMode::Direct => tmom_from_values(data, self.r_order)?,
                        };
                        vec![tm.signed]
                    }
                })
            })
            .collect()
    }

    pub fn observed(&self) -> Result<Observed> {
        let sample = Sample::new(self.values.to_vec())?;
        let e = ecf(&sample, self.grid)?;
        let sigma2 = self.analyzed_sigma2(sample.variance()?);
        let deficits = self.evaluate(
            &e.curve(self.mode),
            sigma2,
            self.values,
            self.pair_seed(None),
        )?;
        Ok(Observed { ecf: e, deficits })
    }

    fn replicate(&self, b: usize) -> Result<Vec<Vec<f64>>> {
        let n = self.values.len();
        let g = self.grid.len();
        let wants_data = self.stats.contains(&Statistic::Tmom);
        let mut rng = self.master.stream_path(&[BOOT_STREAM, b as u64]);
        let mut counts = vec![0u32; n];
        let mut draws = Vec::with_capacity(if wants_data { n } else { 0 });
        for _ in 0..n {
            let j = rng.below(n);
            counts[j] += 1;
            if wants_data {
                draws.push(self.values[j]);
            }
        }

        let mut re = vec![0.0; g];
        let mut im = vec![0.0; g];
        let mut sum = 0.0;
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let w = c as f64;
            let x = self.values[j];
            sum += w * x;
            match &self.table {
                Some(tab) => {
                    let row = j * g..(j + 1) * g;
                    for ((acc, &v), (acc_i, &s)) in re
                        .iter_mut()
                        .zip(&tab.cos[row.clone()])
                        .zip(im.iter_mut().zip(&tab.sin[row]))
                    {
                        *acc += w * v;
                        *acc_i += w * s;
                    }
                }
                None => {
                    for (k, &t) in self.grid.points().iter().enumerate() {
                        let (s, cs) = (t * x).sin_cos();
                        re[k] += w * cs;
                        im[k] += w * s;
                    }
                }
            }
        }
        let nf = n as f64;
        let mean = sum / nf;
        let ss: f64 = counts
            .iter()
            .zip(self.values)
            .filter(|(c, _)| **c > 0)
            .map(|(&c, &x)| c as f64 * (x - mean) * (x - mean))
            .sum();
        let sigma2 = self.analyzed_sigma2(ss / (nf - 1.0));

        let h: Vec<f64> = re
            .iter()
            .zip(&im)
            .map(|(&a, &bim)| {
                let (fr, fi) = (a / nf, bim / nf);
                match self.mode {
                    CurveMode::Symmetrized => (nf * (fr * fr + fi * fi) - 1.0) / (nf - 1.0),
                    CurveMode::Direct => fr,
                }
            })
            .collect();
        self.evaluate(&h, sigma2, &draws, self.pair_seed(Some(b)))
    }

    /// Deficits of the empirical law itself, the population the resamples are
    /// drawn from: `|f̂|²` in place of the U-statistic, 1/n variance, and the
    /// pairwise-difference moments with their zero diagonal included.
    fn plug_in_center(&self, observed: &Observed) -> Result<Vec<Vec<f64>>> {
        let n = self.values.len() as f64;
        let shrink = (n - 1.0) / n;
        let sample = Sample::new(self.values.to_vec())?;
        let sigma2 = self.analyzed_sigma2(sample.variance()? * shrink);
        let h: Vec<f64> = match self.mode {
            CurveMode::Symmetrized => observed
                .ecf
                .complex_values
                .iter()
                .map(|z| z.norm_sqr())
                .collect(),
            CurveMode::Direct => observed.ecf.real_values(),
        };
        let mut center = self.evaluate(&h, sigma2, self.values, self.pair_seed(None))?;
        if self.mode == CurveMode::Symmetrized {
            if let Some(s) = self.stats.iter().position(|&st| st == Statistic::Tmom) {
                let diffs =
                    pairwise_difference_sample(&sample, self.max_pairs, self.pair_seed(None))?;
                let tm = tmom_from_values(diffs.values(), self.r_order)?;
                let bound = gaussian_abs_moment(tm.sigma * shrink.sqrt(), self.r_order)?;
                center[s] = vec![shrink * tm.sample_moment - bound];
            }
        }
        Ok(center)
    }

    pub fn run(&self, replicates: usize) -> Result<BootRun> {
        let observed = self.observed()?;
        let center = self.plug_in_center(&observed)?;
        let reps: Vec<Vec<Vec<f64>>> = (0..replicates)
            .into_par_iter()
            .map(|b| self.replicate(b))
            .collect::<Result<_>>()?;
        let boot = (0..self.stats.len())
            .map(|s| {
                reps.iter()
                    .map(|rep| {
                        let centered: Vec<f64> = rep[s]
                            .iter()
                            .zip(&center[s])
                            .map(|(d_star, d)| d_star - d)
                            .collect();
                        positive_max(&centered)
                    })
                    .collect()
            })
            .collect();
        Ok(BootRun { observed, boot })
    }
}

pub(crate) fn observed_pair_seed(seed: u64) -> u64 {
    CounterRng::new(seed)
        .stream_path(&[PAIR_STREAM, 0])
        .next_u64()
}

/// `(1 + #{T*_b >= T_obs}) / (B + 1)`.
pub(crate) fn bootstrap_p(observed: f64, boot: &[f64]) -> f64 {
    let exceed = boot.iter().filter(|&&v| v >= observed).count();
    (1 + exceed) as f64 / (boot.len() + 1) as f64
}

/// Upper `level` critical value: the `ceil((B + 1)(1 - level))`-th order statistic.
pub(crate) fn critical_value(boot: &[f64], level: f64) -> f64 {
    if boot.is_empty() {
        return 0.0;
    }
    let mut sorted = boot.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((boot.len() + 1) as f64 * (1.0 - level)).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}
