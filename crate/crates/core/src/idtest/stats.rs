//! Deficit statistics built from the necessary conditions for infinite
//! divisibility. Each statistic is the positive part of its largest signed
//! deficit; a positive population value certifies a violation.

use crate::bounds::{gaussian_abs_moment, th2_lower, th4_deficit};
use crate::cf_core::{abs_pow, pairwise_difference_sample, EmpiricalCF, Sample, TGrid};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DeficitStat {
    pub value: f64,
    pub argmax_t: f64,
    /// Grid points the statistic was evaluated on.
    pub points: Vec<f64>,
    /// Signed deficits at those points.
    pub deficits: Vec<f64>,
}

pub(crate) fn positive_max(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

fn summarize(points: Vec<f64>, deficits: Vec<f64>) -> DeficitStat {
    let (best, _) = deficits
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
        );
    DeficitStat {
        value: positive_max(&deficits),
        argmax_t: points.get(best).copied().unwrap_or(0.0),
        points,
        deficits,
    }
}

fn check_curve(grid: &TGrid, h: &[f64]) -> Result<()> {
    if grid.len() != h.len() {
        return invalid(format!(
            "curve has {} values for {} grid points",
            h.len(),
            grid.len()
        ));
    }
    Ok(())
}

/// `exp(-σ² t² / 2) - h(t)` at every grid point.
pub fn t3_deficits(points: &[f64], h: &[f64], sigma2: f64) -> Vec<f64> {
    points
        .iter()
        .zip(h)
        .map(|(&t, &v)| (-sigma2 * t * t / 2.0).exp() - v)
        .collect()
}

/// Gaussian-envelope statistic on a real, even curve `h` sampled on `grid`.
pub fn stat_t3(grid: &TGrid, h: &[f64], sigma2: f64) -> Result<DeficitStat> {
    check_curve(grid, h)?;
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return invalid(format!("sigma2 must be finite and >= 0, got {sigma2}"));
    }
    Ok(summarize(
        grid.points().to_vec(),
        t3_deficits(grid.points(), h, sigma2),
    ))
}

/// T3 on the symmetrized ECF, with `sigma2_sym = 2 * sample variance`.
pub fn stat_t3_ecf(ecf: &EmpiricalCF, sigma2_sym: f64) -> Result<DeficitStat> {
    stat_t3(&ecf.grid, &ecf.sym_values, sigma2_sym)
}

/// `(k, j)` index pairs with `t_j = t_k / 2` exactly.
pub fn t4_pairs(grid: &TGrid) -> Result<Vec<(usize, usize)>> {
    let pairs = grid.dyadic_pairs();
    if pairs.is_empty() {
        return invalid("grid has no point t with t/2 also on the grid");
    }
    Ok(pairs)
}

pub fn t4_deficits(h: &[f64], pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs
        .iter()
        .map(|&(k, j)| th4_deficit(h[k], h[j]))
        .collect()
}

/// Quadrupling statistic `max_t (h(t/2)⁴ - h(t))₊` over dyadic grid pairs.
pub fn stat_t4(grid: &TGrid, h: &[f64]) -> Result<DeficitStat> {
    check_curve(grid, h)?;
    let pairs = t4_pairs(grid)?;
    let points = pairs.iter().map(|&(k, _)| grid.points()[k]).collect();
    Ok(summarize(points, t4_deficits(h, &pairs)))
}

pub fn stat_t4_ecf(ecf: &EmpiricalCF) -> Result<DeficitStat> {
    stat_t4(&ecf.grid, &ecf.sym_values)
}

/// Grid indices inside the m-divisible cosine bound's validity interval.
pub fn t2_indices(grid: &TGrid, sigma: f64, support_radius: f64, m: u32) -> Result<Vec<usize>> {
    let curve = th2_lower(sigma, support_radius, m)?;
    Ok((0..grid.len())
        .filter(|&k| curve.in_validity(grid.points()[k]))
        .collect())
}

/// `cosᵐ(σ t / √m) - h(t)` on the chosen indices.
pub fn t2_deficits(points: &[f64], h: &[f64], indices: &[usize], sigma: f64, m: u32) -> Vec<f64> {
    let mf = m as f64;
    indices
        .iter()
        .map(|&k| {
            let c = (sigma * points[k] / mf.sqrt()).cos();
            let bound = if c > 0.0 {
                (mf * c.ln()).exp()
            } else {
                c.powi(m as i32)
            };
            bound - h[k]
        })
        .collect()
}

/// m-divisibility statistic on the validity interval `min(4.49 m / A, π √m / (2σ))`.
pub fn stat_t2(
    grid: &TGrid,
    h: &[f64],
    sigma: f64,
    support_radius: f64,
    m: u32,
) -> Result<DeficitStat> {
    check_curve(grid, h)?;
    let idx = t2_indices(grid, sigma, support_radius, m)?;
    let points = idx.iter().map(|&k| grid.points()[k]).collect();
    Ok(summarize(
        points,
        t2_deficits(grid.points(), h, &idx, sigma, m),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmomStat {
    pub value: f64,
    /// `m̂_r - bound`, before the positive part.
    pub signed: f64,
    pub sample_moment: f64,
    pub gaussian_bound: f64,
    pub sigma: f64,
}

/// Compares `mean |v|^r` with the Gaussian value at `σ = √(mean v²)`.
pub(crate) fn tmom_from_values(values: &[f64], r: f64) -> Result<TmomStat> {
    let n = values.len() as f64;
    let sample_moment = values.iter().map(|&v| abs_pow(v, r)).sum::<f64>() / n;
    let sigma = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let gaussian_bound = gaussian_abs_moment(sigma, r)?;
    let signed = sample_moment - gaussian_bound;
    Ok(TmomStat {
        value: signed.max(0.0),
        signed,
        sample_moment,
        gaussian_bound,
        sigma,
    })
}

fn check_order(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 2.0) {
        return invalid(format!("order r must lie in (0, 2), got {r}"));
    }
    Ok(())
}

/// Fractional-moment statistic on pairwise differences `x_i - x_j`.
pub fn stat_tmom(sample: &Sample, r: f64, max_pairs: usize, seed: u64) -> Result<TmomStat> {
    check_order(r)?;
    let diffs = pairwise_difference_sample(sample, max_pairs, seed)?;
    tmom_from_values(diffs.values(), r)
}

/// Fractional-moment statistic on data already symmetric about 0.
pub fn stat_tmom_direct(sample: &Sample, r: f64) -> Result<TmomStat> {
    check_order(r)?;
    tmom_from_values(sample.values(), r)
}

/// Population value of the pairwise-difference moment for a two-point law
/// `±a`: `E|X - X'|^r = 2^{r-1} a^r`. Used as a documented reference.
pub fn rademacher_difference_moment(a: f64, r: f64) -> f64 {
    2f64.powf(r - 1.0) * a.powf(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::CharFn;
    use crate::cf_core::{ecf, make_grid};
    use crate::refdist::RefDist;
    use std::f64::consts::PI;

    #[test]
    fn t3_equality_and_uniform() {
        let g = make_grid(8.0, 257).unwrap();
        let gauss = RefDist::Gaussian { sigma: 1.3 };
        let s = stat_t3(&g, &gauss.cf_eval(&g), gauss.sigma2()).unwrap();
        assert_eq!(s.value, 0.0);

        let grid = TGrid::from_points(vec![0.0, 1.0, 2.0, PI]).unwrap();
        let u = RefDist::Uniform { a: 1.0 };
        let s = stat_t3(&grid, &u.cf_eval(&grid), 1.0 / 3.0).unwrap();
        assert!(s.value >= 0.193_025_289_139_898 - 1e-12);
        assert_eq!(s.argmax_t, PI);
        assert!(stat_t3(&grid, &[1.0], 1.0).is_err());
    }

    #[test]
    fn t4_cases() {
        let g = make_grid(8.0, 257).unwrap();
        let gauss = RefDist::Gaussian { sigma: 1.0 };
        assert!(stat_t4(&g, &gauss.cf_eval(&g)).unwrap().value < 1e-15);

        // direct two-point CF cos t, grid through π
        let g = make_grid(2.0 * PI, 129).unwrap();
        let h: Vec<f64> = g.points().iter().map(|t| t.cos()).collect();
        let s = stat_t4(&g, &h).unwrap();
        assert!(s.value >= 1.0 - 1e-12);
        // symmetrized two-point CF cos²t: sup of u⁴ - (2u - 1)² is 0.0902 (oracle)
        let h2: Vec<f64> = h.iter().map(|c| c * c).collect();
        let s2 = stat_t4(&g, &h2).unwrap();
        assert!(s2.value > 0.08 && s2.value <= 0.090_169_943_749_474_1 + 1e-12);

        let no_pairs = TGrid::from_points(vec![0.0, 1.0, 3.0]).unwrap();
        assert!(stat_t4(&no_pairs, &[1.0, 0.5, 0.1]).is_err());
    }

    #[test]
    fn t4_every_point_has_exact_half() {
        let g = make_grid(5.3, 256).unwrap();
        let h = vec![0.5; 256];
        let s = stat_t4(&g, &h).unwrap();
        for &t in &s.points {
            assert!(g.points().contains(&(t / 2.0)));
        }
    }

    #[test]
    fn t2_equality_on_binomial() {
        let m = 3;
        let d = RefDist::BinomSym { m, a: 1.0 };
        let g = make_grid(4.0, 401).unwrap();
        let h = d.cf_eval(&g);
        let s = stat_t2(&g, &h, d.sigma2().sqrt(), 3.0, m).unwrap();
        assert!(s.value < 1e-12);
        assert!(s.points.last().unwrap() <= &(PI / 2.0));
        // Uniform with m = 1 and A = 1 satisfies the m = 1 bound too
        let u = RefDist::Uniform { a: 1.0 };
        let s = stat_t2(&g, &u.cf_eval(&g), (1.0f64 / 3.0).sqrt(), 1.0, 1).unwrap();
        assert!(s.value < 1e-12);
    }

    #[test]
    fn tmom_references() {
        // Rademacher: E|X - X'| = 1 < 2/√π
        let s = Sample::new(vec![-1.0, 1.0, -1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!((rademacher_difference_moment(1.0, 1.0) - 1.0).abs() < 1e-15);
        let t = stat_tmom(&s, 1.0, 1000, 1).unwrap();
        assert_eq!(t.value, 0.0);
        assert!(t.gaussian_bound > t.sample_moment);

        // Laplace population: 3b/2 against 2b √(2/π)
        let lap = RefDist::Laplace { b: 1.0 }.sample(3000, 4).unwrap();
        let t = stat_tmom(&lap, 1.0, 200_000, 2).unwrap();
        assert!((t.sample_moment - 1.5).abs() < 0.1);
        assert!((t.gaussian_bound - 2.0 * (2.0 / PI).sqrt()).abs() < 0.15);
        assert_eq!(t.value, 0.0);
        assert!(stat_tmom(&lap, 2.0, 10, 1).is_err());
    }

    #[test]
    fn tmom_gaussian_shrinks() {
        let g = RefDist::Gaussian { sigma: 1.0 };
        let small = stat_tmom(&g.sample(200, 1).unwrap(), 1.0, 1_000_000, 1).unwrap();
        let large = stat_tmom(&g.sample(3000, 1).unwrap(), 1.0, 200_000, 1).unwrap();
        assert!(small.signed.abs() < 0.1);
        assert!(large.signed.abs() < 0.03);
    }

    #[test]
    fn gaussian_draws_t3_small() {
        let d = RefDist::Gaussian { sigma: 1.0 };
        let s = d.sample(2000, 5).unwrap();
        let g = make_grid(8.0 / 2f64.sqrt(), 256).unwrap();
        let e = ecf(&s, &g).unwrap();
        let t3 = stat_t3_ecf(&e, 2.0 * s.variance().unwrap()).unwrap();
        assert!(t3.value < 0.1);
        let _ = d.cf(1.0);
    }
}
