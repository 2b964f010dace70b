//! Lower and upper bounds for symmetric characteristic functions, their
//! validity radii, and the numerical tools they rely on.
//!
//! Every curve is even in `t`; validity intervals are symmetric and stored as
//! a half-width.

pub mod fracmoment;
pub mod quad;
pub mod root;
pub mod special;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cf_core::MomentSet;
use crate::error::{invalid, Error, Result};

pub use fracmoment::{cr_constant, fractional_moment_via_cf, FracMoment};
pub use root::{root_z0, RootResult};
pub use special::{gamma_fn, gaussian_abs_moment};

/// Conservative convexity constant used in the compact-support radii.
pub const Z0_CONSERVATIVE: f64 = 4.49;

/// A real, even characteristic function.
pub trait CharFn: Sync {
    fn cf(&self, t: f64) -> f64;

    /// `ln cf(t)`; override when a closed form avoids rounding near `t = 0`.
    fn ln_cf(&self, t: f64) -> f64 {
        self.cf(t).ln()
    }
}

impl<F: Fn(f64) -> f64 + Sync> CharFn for F {
    fn cf(&self, t: f64) -> f64 {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    Th1Lower,
    Th1aLower,
    Th2Lower,
    Th2aLower,
    Th3Lower,
    Th21Upper,
}

impl BoundKind {
    pub fn is_upper(self) -> bool {
        matches!(self, BoundKind::Th21Upper)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub params: BTreeMap<&'static str, f64>,
    /// Half-width of the validity interval; `f64::INFINITY` for all t.
    pub validity: f64,
    /// Radius comes from an asymptotic argument rather than a proved bound.
    pub heuristic: bool,
    /// A negative radius estimate was clamped to 0.
    pub clamped: bool,
}

impl BoundCurve {
    fn new(kind: BoundKind, validity: f64, params: &[(&'static str, f64)]) -> Self {
        Self {
            kind,
            params: params.iter().copied().collect(),
            validity,
            heuristic: false,
            clamped: false,
        }
    }

    fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            BoundKind::Th1Lower | BoundKind::Th1aLower => (self.param("sigma") * t).cos(),
            BoundKind::Th2Lower | BoundKind::Th2aLower => {
                let m = self.param("m");
                cos_power((self.param("sigma") * t / m.sqrt()).cos(), m)
            }
            BoundKind::Th3Lower => (-self.param("sigma2") * t * t / 2.0).exp(),
            BoundKind::Th21Upper => (self.param("scale") * t).cos(),
        }
    }

    pub fn in_validity(&self, t: f64) -> bool {
        t.abs() <= self.validity
    }

    /// Value together with the validity flag.
    pub fn eval(&self, t: f64) -> (f64, bool) {
        (self.value(t), self.in_validity(t))
    }

    /// Signed violation: positive when `f` breaks the inequality at `t`.
    pub fn deficit(&self, t: f64, f: f64) -> f64 {
        if self.kind.is_upper() {
            f - self.value(t)
        } else {
            self.value(t) - f
        }
    }
}

/// `base^m`, through `exp(m ln base)` for positive bases.
fn cos_power(base: f64, m: f64) -> f64 {
    if base > 0.0 {
        (m * base.ln()).exp()
    } else {
        base.powi(m as i32)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return invalid(format!("{name} must be finite and positive, got {v}"));
    }
    Ok(())
}

fn check_sigma_vs_support(sigma: f64, a: f64) -> Result<()> {
    positive("sigma", sigma)?;
    positive("support radius A", a)?;
    if sigma > a * (1.0 + 1e-12) {
        return invalid(format!(
            "sigma = {sigma} exceeds support radius A = {a}; no distribution on [-A, A] has that spread"
        ));
    }
    Ok(())
}

/// `cos(σ t) <= g(t)` for an even law on `[-A, A]`, valid for `|t| < 4.49 / A`.
pub fn th1_lower(sigma: f64, a: f64) -> Result<BoundCurve> {
    check_sigma_vs_support(sigma, a)?;
    Ok(BoundCurve::new(
        BoundKind::Th1Lower,
        Z0_CONSERVATIVE / a,
        &[("sigma", sigma), ("A", a)],
    ))
}

/// As [`th1_lower`] with the radius `z₀ / A` from the computed root.
pub fn th1_lower_sharp(sigma: f64, a: f64) -> Result<BoundCurve> {
    let mut curve = th1_lower(sigma, a)?;
    curve.validity = root_z0().value / a;
    Ok(curve)
}

fn check_moments(m: &MomentSet) -> Result<()> {
    for (name, v) in [
        ("sigma2", m.sigma2),
        ("a4", m.a4),
        ("a5", m.a5),
        ("a10", m.a10),
    ] {
        if !v.is_finite() {
            return invalid(format!("moment {name} is not finite"));
        }
    }
    if !(m.sigma2 > 0.0) {
        return invalid("sigma2 must be positive");
    }
    Ok(())
}

fn th1a_raw(m: &MomentSet) -> f64 {
    let s = m.sigma();
    let s5 = s.powi(5);
    5.0 * (m.a4 - m.sigma2 * m.sigma2) / (s5 * s5 + 2.0 * s5 * m.a5 + m.a10).sqrt()
}

/// Radius `5 (a₄ - σ⁴) / √(σ¹⁰ + 2σ⁵a₅ + a₁₀)` for `cos(σ t) <= g(t)`,
/// clamped at 0.
pub fn th1a_radius(m: &MomentSet) -> Result<f64> {
    check_moments(m)?;
    Ok(th1a_raw(m).max(0.0))
}

pub fn th1a_lower(m: &MomentSet) -> Result<BoundCurve> {
    check_moments(m)?;
    let raw = th1a_raw(m);
    let mut curve = BoundCurve::new(
        BoundKind::Th1aLower,
        raw.max(0.0),
        &[
            ("sigma", m.sigma()),
            ("a4", m.a4),
            ("a5", m.a5),
            ("a10", m.a10),
        ],
    );
    curve.clamped = raw < 0.0;
    Ok(curve)
}

/// Quantitative envelope `g(t) - cos(σt) >= t⁴/24 · ((a₄ - σ⁴) - √D |t| / 5)`.
/// Diagnostic only.
pub fn th1a_envelope(m: &MomentSet, t: f64) -> Result<f64> {
    check_moments(m)?;
    let s5 = m.sigma().powi(5);
    let d = (s5 * s5 + 2.0 * s5 * m.a5 + m.a10).sqrt();
    Ok(t.powi(4) / 24.0 * ((m.a4 - m.sigma2 * m.sigma2) - d * t.abs() / 5.0))
}

/// `cosᵐ(σ t / √m) <= f(t)` for an m-divisible law on `[-A, A]`, valid for
/// `|t| <= min(4.49 m / A, π √m / (2σ))`.
pub fn th2_lower(sigma: f64, a: f64, m: u32) -> Result<BoundCurve> {
    if m < 1 {
        return invalid("m must be at least 1");
    }
    check_sigma_vs_support(sigma, a)?;
    let mf = m as f64;
    let validity = (Z0_CONSERVATIVE * mf / a).min(PI * mf.sqrt() / (2.0 * sigma));
    Ok(BoundCurve::new(
        BoundKind::Th2Lower,
        validity,
        &[("sigma", sigma), ("A", a), ("m", mf)],
    ))
}

/// Moment-based m-divisible variant. The radius uses `a_{k,m} ≈ a_k / m`:
/// `min(√m · th1a_radius(a_k / m), π √m / (2σ))`. Flagged heuristic.
pub fn th2a_lower(moments: &MomentSet, m: u32) -> Result<BoundCurve> {
    if m < 1 {
        return invalid("m must be at least 1");
    }
    check_moments(moments)?;
    let mf = m as f64;
    let scaled = MomentSet::new(
        moments.sigma2 / mf,
        moments.a4 / mf,
        moments.a5 / mf,
        moments.a10 / mf,
    )?;
    let raw = th1a_raw(&scaled);
    let sigma = moments.sigma();
    let validity = (mf.sqrt() * raw.max(0.0)).min(PI * mf.sqrt() / (2.0 * sigma));
    let mut curve = BoundCurve::new(
        BoundKind::Th2aLower,
        validity,
        &[("sigma", sigma), ("m", mf)],
    );
    curve.heuristic = true;
    curve.clamped = raw < 0.0;
    Ok(curve)
}

/// `exp(-σ² t² / 2) <= f(t)` for every t, for symmetric ID laws with variance σ².
pub fn th3_lower(sigma2: f64) -> Result<BoundCurve> {
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return invalid(format!("sigma2 must be finite and >= 0, got {sigma2}"));
    }
    Ok(BoundCurve::new(
        BoundKind::Th3Lower,
        f64::INFINITY,
        &[("sigma2", sigma2)],
    ))
}

/// `f(t/2)⁴ - f(t)`, with `f(t/2)` clamped to `[0, 1]` before the power.
/// Positive means `f(t) >= f⁴(t/2)` fails at this t.
pub fn th4_deficit(f_t: f64, f_half_t: f64) -> f64 {
    f_half_t.clamp(0.0, 1.0).powi(4) - f_t
}

/// `f(t / 2^k)^{4^k}`, evaluated in log space.
pub fn iterate_th4<H: CharFn + ?Sized>(f: &H, t: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Ok(f.cf(t));
    }
    if k > 500 {
        return invalid("iteration depth k must be at most 500");
    }
    let x = t / 2f64.powi(k as i32);
    let v = f.cf(x);
    if !(v > 0.0) {
        return Err(Error::UndefinedIterate { t: x, value: v });
    }
    Ok((4f64.powi(k as i32) * f.ln_cf(x)).exp())
}

/// Upper bound `g(t) <= cos(a_{1/γ}^γ t)` on `|t| < π / (2 A^γ)`, where
/// `a_gamma` is the absolute moment of order `1/γ`.
pub fn th21_upper(a_gamma: f64, gamma: f64, a: f64) -> Result<BoundCurve> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return invalid(format!("gamma must exceed 1, got {gamma}"));
    }
    positive("a_gamma", a_gamma)?;
    positive("support radius A", a)?;
    if a_gamma > a.powf(1.0 / gamma) * (1.0 + 1e-12) {
        return invalid(format!(
            "moment a_(1/gamma) = {a_gamma} exceeds A^(1/gamma) = {}",
            a.powf(1.0 / gamma)
        ));
    }
    Ok(BoundCurve::new(
        BoundKind::Th21Upper,
        PI / (2.0 * a.powf(gamma)),
        &[
            ("a_gamma", a_gamma),
            ("gamma", gamma),
            ("A", a),
            ("scale", a_gamma.powf(gamma)),
        ],
    ))
}
