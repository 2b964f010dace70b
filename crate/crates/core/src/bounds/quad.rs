//! Globally adaptive 7/15-point Gauss–Kronrod quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Equal pieces the interval is cut into before adaptation starts.
    pub initial_pieces: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 0.0,
            max_intervals: 50_000,
            initial_pieces: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return invalid(format!(
            "integration needs a finite interval with a <= b, got [{a}, {b}]"
        ));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let pieces = opts.initial_pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(pieces * 2);
    let (mut total, mut err) = (0.0, 0.0);
    let mut evaluations = 0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let (value, error) = gk15(&f, lo, hi);
        evaluations += 15;
        total += value;
        err += error;
        heap.push(Piece {
            a: lo,
            b: hi,
            value,
            error,
        });
    }

    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::NumericFailure(format!(
                "quadrature on [{a}, {b}] did not reach tolerance: error {err:e} after {} intervals",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap holds at least one piece");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total += lv + rv - worst.value;
        err += le + re - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        if !total.is_finite() {
            return Err(Error::NumericFailure(
                "integrand produced a non-finite value".into(),
            ));
        }
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let abs_error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        abs_error,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let r = integrate(
            |x| x.powi(5) - 3.0 * x * x,
            -1.0,
            2.0,
            QuadOptions::default(),
        )
        .unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_oscillatory() {
        let r = integrate(|x| (-x * x).exp(), 0.0, 10.0, QuadOptions::default()).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10);
        let opts = QuadOptions {
            initial_pieces: 64,
            ..Default::default()
        };
        let r = integrate(|x| (x * 50.0).cos(), 0.0, 3.0, opts).unwrap();
        assert!((r.value - (150.0f64).sin() / 50.0).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(
            |x| 1.0 / x.sqrt(),
            0.0,
            1.0,
            QuadOptions {
                abs_tol: 1e-8,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((r.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(integrate(|x| x, 1.0, 0.0, QuadOptions::default()).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, QuadOptions::default()).is_err());
        let tight = QuadOptions {
            abs_tol: 0.0,
            max_intervals: 10,
            ..Default::default()
        };
        assert!(matches!(
            integrate(|x| x.sin() / x.sqrt().max(1e-300), 0.0, 100.0, tight),
            Err(Error::NumericFailure(_))
        ));
    }
}
