//! Samples, evaluation grids, the empirical characteristic function and
//! absolute-moment estimation.

use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::CounterRng;

/// A finite set of real observations. All values are finite and there is at
/// least one of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return invalid("sample is empty");
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("sample value at index {pos} is not finite"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    /// Unbiased sample variance (divisor `n - 1`).
    pub fn variance(&self) -> Result<f64> {
        self.require_estimable()?;
        let mean = self.mean();
        let ss: f64 = self.values.iter().map(|x| (x - mean) * (x - mean)).sum();
        Ok(ss / (self.n() - 1) as f64)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|x| c * x).collect())
    }

    pub fn require_estimable(&self) -> Result<()> {
        if self.n() < 2 {
            return invalid(format!("need at least 2 observations, got {}", self.n()));
        }
        Ok(())
    }
}

/// Strictly increasing, nonnegative evaluation points for the t-axis.
/// Negative t is covered by evenness of the symmetrized CF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    points: Vec<f64>,
    uniform: bool,
}

/// Uniform grid on `[0, t_max]` with `count` points, both endpoints included.
///
/// Points are `t_max * (k / (count - 1))`, so `t_{2j} == 2 * t_j` holds exactly
/// in floating point and the last point is `t_max` itself.
pub fn make_grid(t_max: f64, count: usize) -> Result<TGrid> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return invalid(format!(
            "grid t_max must be finite and positive, got {t_max}"
        ));
    }
    if count < 2 {
        return invalid(format!("grid needs at least 2 points, got {count}"));
    }
    let denom = (count - 1) as f64;
    let points = (0..count).map(|k| t_max * (k as f64 / denom)).collect();
    Ok(TGrid {
        points,
        uniform: true,
    })
}

impl TGrid {
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("grid is empty");
        }
        if points.iter().any(|t| !t.is_finite()) {
            return invalid("grid contains a non-finite point");
        }
        if points[0] < 0.0 {
            return invalid("grid points must be nonnegative");
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("grid points must be strictly increasing");
        }
        Ok(Self {
            points,
            uniform: false,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Index of the point equal to `points[k] / 2`, if the grid holds it exactly.
    pub fn half_index(&self, k: usize) -> Option<usize> {
        let half = self.points[k] / 2.0;
        if self.uniform {
            return (k.is_multiple_of(2) && self.points[k / 2] == half).then_some(k / 2);
        }
        self.points[..=k]
            .binary_search_by(|p| p.total_cmp(&half))
            .ok()
    }

    /// Pairs `(k, half_index(k))` for all `t_k > 0` with an exact half point.
    pub fn dyadic_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .filter(|&k| self.points[k] > 0.0)
            .filter_map(|k| self.half_index(k).map(|j| (k, j)))
            .collect()
    }

    /// The same grid with every point multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return invalid("grid scale must be finite and positive");
        }
        Ok(Self {
            points: self.points.iter().map(|t| t * c).collect(),
            uniform: self.uniform,
        })
    }
}

/// Which real curve of the ECF the inequalities are applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    /// Unbiased estimate of |f(t)|², the CF of X − X′.
    Symmetrized,
    /// Re f̂(t); only meaningful when the data are already symmetric about 0.
    Direct,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCF {
    pub grid: TGrid,
    pub complex_values: Vec<Complex64>,
    pub sym_values: Vec<f64>,
    pub sym_variance: Vec<f64>,
}

impl EmpiricalCF {
    pub fn real_values(&self) -> Vec<f64> {
        self.complex_values.iter().map(|z| z.re).collect()
    }

    pub fn curve(&self, mode: CurveMode) -> Vec<f64> {
        match mode {
            CurveMode::Symmetrized => self.sym_values.clone(),
            CurveMode::Direct => self.real_values(),
        }
    }
}

/// `(1/n) Σ exp(i t x_j)` at a single `t`.
pub fn ecf_point(values: &[f64], t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in values {
        let (s, c) = (t * x).sin_cos();
        re += c;
        im += s;
    }
    let n = values.len() as f64;
    Complex64::new(re / n, im / n)
}

pub fn ecf(sample: &Sample, grid: &TGrid) -> Result<EmpiricalCF> {
    sample.require_estimable()?;
    let xs = sample.values();
    let n = xs.len() as f64;
    let complex_values: Vec<Complex64> = grid.points().iter().map(|&t| ecf_point(xs, t)).collect();
    let sym_values = symmetrize_ecf(&complex_values, sample.n())?;

    // Hoeffding projection of the pairwise kernel cos(t(x_i - x_j)):
    // g_i = (n Re(e^{-i t x_i} f̂) - 1) / (n - 1), Var(U) ≈ 4 Var(g) / n.
    let sym_variance = grid
        .points()
        .iter()
        .zip(&complex_values)
        .zip(&sym_values)
        .map(|((&t, f), &u)| {
            if t == 0.0 {
                return 0.0;
            }
            let ss: f64 = xs
                .iter()
                .map(|&x| {
                    let (s, c) = (t * x).sin_cos();
                    let g = (n * (c * f.re + s * f.im) - 1.0) / (n - 1.0);
                    (g - u) * (g - u)
                })
                .sum();
            4.0 * ss / (n * (n - 1.0))
        })
        .collect();

    Ok(EmpiricalCF {
        grid: grid.clone(),
        complex_values,
        sym_values,
        sym_variance,
    })
}

/// Unbiased estimator of |f(t)|² from the ECF: `(n |f̂|² - 1) / (n - 1)`,
/// identical to the pairwise mean of `cos(t (x_i - x_j))` over `i != j`.
pub fn symmetrize_ecf(complex_values: &[Complex64], n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return invalid(format!("symmetrization needs n >= 2, got {n}"));
    }
    let nf = n as f64;
    Ok(complex_values
        .iter()
        .map(|z| (nf * z.norm_sqr() - 1.0) / (nf - 1.0))
        .collect())
}

/// Estimated absolute moments `a_r = (1/n) Σ |x_j - c|^r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub sigma2: f64,
    pub a4: f64,
    pub a5: f64,
    pub a10: f64,
    /// Extra (usually fractional) orders as `(order, a_order)`.
    pub a_frac: Vec<(f64, f64)>,
}

impl MomentSet {
    pub fn new(sigma2: f64, a4: f64, a5: f64, a10: f64) -> Result<Self> {
        for (name, v) in [("sigma2", sigma2), ("a4", a4), ("a5", a5), ("a10", a10)] {
            if !v.is_finite() || v < 0.0 {
                return invalid(format!("moment {name} must be finite and >= 0, got {v}"));
            }
        }
        Ok(Self {
            sigma2,
            a4,
            a5,
            a10,
            a_frac: Vec::new(),
        })
    }

    pub fn with_order(mut self, order: f64, value: f64) -> Self {
        self.a_frac.push((order, value));
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    pub fn abs_moment(&self, order: f64) -> Option<f64> {
        match order {
            2.0 => Some(self.sigma2),
            4.0 => Some(self.a4),
            5.0 => Some(self.a5),
            10.0 => Some(self.a10),
            o => self.a_frac.iter().find(|(k, _)| *k == o).map(|&(_, v)| v),
        }
    }

    /// All known `(order, a_order)` pairs sorted by order.
    pub fn ordered(&self) -> Vec<(f64, f64)> {
        let mut all = vec![
            (2.0, self.sigma2),
            (4.0, self.a4),
            (5.0, self.a5),
            (10.0, self.a10),
        ];
        all.extend(self.a_frac.iter().copied());
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all.dedup_by(|a, b| a.0 == b.0);
        all
    }

    /// Lyapunov: `a_j^{1/j}` is nondecreasing in `j`.
    pub fn lyapunov_holds(&self, rel_tol: f64) -> bool {
        let norms: Vec<f64> = self
            .ordered()
            .into_iter()
            .map(|(j, a)| a.powf(1.0 / j))
            .collect();
        norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - rel_tol))
    }
}

/// `|x|^r` with `0^r = 0`; integer orders use repeated multiplication.
#[inline]
pub fn abs_pow(x: f64, r: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        0.0
    } else if r.fract() == 0.0 && r <= 16.0 {
        ax.powi(r as i32)
    } else {
        (r * ax.ln()).exp()
    }
}

/// Absolute moment of order `r` about `center`.
pub fn abs_moment(values: &[f64], center: f64, r: f64) -> f64 {
    values.iter().map(|&x| abs_pow(x - center, r)).sum::<f64>() / values.len() as f64
}

pub fn moments(sample: &Sample, orders: &[f64], centered: bool) -> Result<MomentSet> {
    sample.require_estimable()?;
    if let Some(r) = orders.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return invalid(format!(
            "moment orders must be positive and finite, got {r}"
        ));
    }
    let center = if centered { sample.mean() } else { 0.0 };
    let xs = sample.values();
    let mut set = MomentSet::new(
        abs_moment(xs, center, 2.0),
        abs_moment(xs, center, 4.0),
        abs_moment(xs, center, 5.0),
        abs_moment(xs, center, 10.0),
    )?;
    for &r in orders {
        if set.abs_moment(r).is_none() {
            set.a_frac.push((r, abs_moment(xs, center, r)));
        }
    }
    Ok(set)
}

/// Up to `max_pairs` differences `x_i - x_j` (`i != j`), drawn without
/// replacement from the `n (n - 1)` ordered pairs. When `max_pairs` covers all
/// of them they are returned in lexicographic `(i, j)` order.
pub fn pairwise_difference_sample(sample: &Sample, max_pairs: usize, seed: u64) -> Result<Sample> {
    sample.require_estimable()?;
    if max_pairs < 1 {
        return invalid("max_pairs must be at least 1");
    }
    let xs = sample.values();
    let n = xs.len();
    let total = n * (n - 1);
    let pair = |p: usize| {
        let i = p / (n - 1);
        let jj = p % (n - 1);
        let j = if jj >= i { jj + 1 } else { jj };
        xs[i] - xs[j]
    };
    if max_pairs >= total {
        return Sample::new((0..total).map(pair).collect());
    }

    // Floyd's algorithm: exactly max_pairs distinct indices.
    let mut rng = CounterRng::new(seed);
    let mut chosen = HashSet::with_capacity(max_pairs);
    let mut order = Vec::with_capacity(max_pairs);
    for upper in (total - max_pairs)..total {
        let candidate = rng.below(upper + 1);
        let pick = if chosen.insert(candidate) {
            candidate
        } else {
            chosen.insert(upper);
            upper
        };
        order.push(pick);
    }
    Sample::new(order.into_iter().map(pair).collect())
}
