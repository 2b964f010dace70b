//! Gamma function and Gaussian absolute moments.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
/// No domain checks; callers validate.
pub(crate) fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Γ(x) for `x` in (0, 10].
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 10.0) {
        return invalid(format!("gamma_fn is defined here on (0, 10], got {x}"));
    }
    Ok(lanczos_gamma(x))
}

/// `E|Y|^r` for `Y ~ N(0, σ²)` and any order `r > 0` up to 19.
pub(crate) fn normal_abs_moment(sigma: f64, r: f64) -> f64 {
    2f64.powf(r / 2.0) * sigma.powf(r) * lanczos_gamma((1.0 + r) / 2.0) / PI.sqrt()
}

/// `E|Y|^r = 2^{r/2} σ^r Γ((1+r)/2) / √π` for `Y ~ N(0, σ²)`, `0 < r < 2`.
pub fn gaussian_abs_moment(sigma: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 2.0) {
        return invalid(format!("order r must lie in (0, 2), got {r}"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return invalid(format!("sigma must be finite and >= 0, got {sigma}"));
    }
    let g = gamma_fn((1.0 + r) / 2.0)?;
    Ok(2f64.powf(r / 2.0) * sigma.powf(r) * g / PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn exact_values() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(2.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(5.0).unwrap(), 24.0) < 1e-14);
        // mpmath, 30 digits
        assert!((gamma_fn(0.75).unwrap() - 1.225_416_702_465_177_6).abs() < 1e-8);
    }

    #[test]
    fn recurrence_across_domain() {
        // Γ(x + 1) = x Γ(x) as an independent check of relative accuracy.
        let mut x = 0.01;
        while x < 9.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
            x += 0.137;
        }
        // Product of factorials for integer arguments.
        let mut fact = 1.0;
        for k in 1..10 {
            assert!(rel(gamma_fn(k as f64).unwrap(), fact) < 1e-13);
            fact *= k as f64;
        }
    }

    #[test]
    fn domain() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(10.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let s = 1.7;
        let m1 = gaussian_abs_moment(s, 1.0).unwrap();
        assert!(rel(m1, s * (2.0 / PI).sqrt()) < 1e-13);
        let near2 = gaussian_abs_moment(s, 1.999).unwrap();
        assert!((near2 - s * s).abs() < 1e-3 * s * s);
        // ∫|x|^0.5 φ(x) dx by mpmath quadrature
        assert!((gaussian_abs_moment(1.0, 0.5).unwrap() - 0.822_178_958_662_458_5).abs() < 1e-12);
        assert!(gaussian_abs_moment(1.0, 2.0).is_err());
        assert!(gaussian_abs_moment(1.0, 0.0).is_err());
        assert!((normal_abs_moment(1.0, 4.0) - 3.0).abs() < 1e-12);
        assert!((normal_abs_moment(1.0, 10.0) - 945.0).abs() < 1e-9);
    }
}
