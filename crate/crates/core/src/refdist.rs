//! Reference distributions with closed-form characteristic functions and a
//! known divisibility status. All entries are symmetric about 0, so their
//! CFs are real and even.

use serde::{Deserialize, Serialize};

use crate::bounds::special::{lanczos_gamma, normal_abs_moment};
use crate::bounds::CharFn;
use crate::cf_core::{MomentSet, Sample, TGrid};
use crate::error::{invalid, Error, Result};
use crate::rng::CounterRng;

pub const REGISTRY_NAMES: [&str; 7] = [
    "gaussian",
    "sympoisson",
    "laplace",
    "uniform",
    "rademacher",
    "binomsym",
    "triangular",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Divisibility {
    InfinitelyDivisible,
    MDivisible(u32),
    NotId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum RefDist {
    Gaussian {
        sigma: f64,
    },
    /// `N₁ - N₂` with independent Poisson(λ) components.
    SymPoisson {
        lambda: f64,
    },
    Laplace {
        b: f64,
    },
    Uniform {
        a: f64,
    },
    Rademacher {
        a: f64,
    },
    /// Sum of `m` independent Rademacher(±a) variables.
    BinomSym {
        m: u32,
        a: f64,
    },
    /// Sum of two independent Uniform[-A/2, A/2]; support [-A, A].
    Triangular {
        a: f64,
    },
}

/// Every entry with its default parameters.
pub fn registry() -> Vec<RefDist> {
    REGISTRY_NAMES
        .iter()
        .map(|name| RefDist::by_name(name).expect("registry names are valid"))
        .collect()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

impl RefDist {
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "gaussian" => RefDist::Gaussian { sigma: 1.0 },
            "sympoisson" => RefDist::SymPoisson { lambda: 1.0 },
            "laplace" => RefDist::Laplace { b: 1.0 },
            "uniform" => RefDist::Uniform { a: 1.0 },
            "rademacher" => RefDist::Rademacher { a: 1.0 },
            "binomsym" => RefDist::BinomSym { m: 3, a: 1.0 },
            "triangular" => RefDist::Triangular { a: 1.0 },
            other => {
                return invalid(format!(
                    "unknown distribution '{other}'; expected one of {}",
                    REGISTRY_NAMES.join(", ")
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RefDist::Gaussian { .. } => "gaussian",
            RefDist::SymPoisson { .. } => "sympoisson",
            RefDist::Laplace { .. } => "laplace",
            RefDist::Uniform { .. } => "uniform",
            RefDist::Rademacher { .. } => "rademacher",
            RefDist::BinomSym { .. } => "binomsym",
            RefDist::Triangular { .. } => "triangular",
        }
    }

    fn index(&self) -> u64 {
        REGISTRY_NAMES
            .iter()
            .position(|n| *n == self.name())
            .unwrap() as u64
    }

    pub fn validate(&self) -> Result<()> {
        let (label, v) = match *self {
            RefDist::Gaussian { sigma } => ("sigma", sigma),
            RefDist::SymPoisson { lambda } => {
                if lambda > 30.0 {
                    return invalid("sympoisson lambda must be at most 30");
                }
                ("lambda", lambda)
            }
            RefDist::Laplace { b } => ("b", b),
            RefDist::Uniform { a } | RefDist::Rademacher { a } | RefDist::Triangular { a } => {
                ("a", a)
            }
            RefDist::BinomSym { m, a } => {
                if m < 1 {
                    return invalid("binomsym needs m >= 1");
                }
                ("a", a)
            }
        };
        if !(v.is_finite() && v > 0.0) {
            return invalid(format!(
                "{} parameter {label} must be finite and positive",
                self.name()
            ));
        }
        Ok(())
    }

    pub fn divisibility(&self) -> Divisibility {
        match self {
            RefDist::Gaussian { .. } | RefDist::SymPoisson { .. } | RefDist::Laplace { .. } => {
                Divisibility::InfinitelyDivisible
            }
            RefDist::BinomSym { m, .. } => Divisibility::MDivisible(*m),
            RefDist::Uniform { .. } | RefDist::Rademacher { .. } | RefDist::Triangular { .. } => {
                Divisibility::NotId
            }
        }
    }

    pub fn sigma2(&self) -> f64 {
        match *self {
            RefDist::Gaussian { sigma } => sigma * sigma,
            RefDist::SymPoisson { lambda } => 2.0 * lambda,
            RefDist::Laplace { b } => 2.0 * b * b,
            RefDist::Uniform { a } => a * a / 3.0,
            RefDist::Rademacher { a } => a * a,
            RefDist::BinomSym { m, a } => m as f64 * a * a,
            RefDist::Triangular { a } => a * a / 6.0,
        }
    }

    /// Radius of the support, `None` when unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            RefDist::Gaussian { .. } | RefDist::SymPoisson { .. } | RefDist::Laplace { .. } => None,
            RefDist::Uniform { a } | RefDist::Rademacher { a } | RefDist::Triangular { a } => {
                Some(a)
            }
            RefDist::BinomSym { m, a } => Some(m as f64 * a),
        }
    }

    pub fn cf_eval(&self, grid: &TGrid) -> Vec<f64> {
        grid.points().iter().map(|&t| self.cf(t)).collect()
    }

    /// `E|X|^r`, in closed form or by exact enumeration for lattice laws.
    pub fn abs_moment(&self, r: f64) -> f64 {
        match *self {
            RefDist::Gaussian { sigma } => normal_abs_moment(sigma, r),
            RefDist::Laplace { b } => b.powf(r) * lanczos_gamma(r + 1.0),
            RefDist::Uniform { a } => a.powf(r) / (r + 1.0),
            RefDist::Rademacher { a } => a.powf(r),
            RefDist::Triangular { a } => 2.0 * a.powf(r) / ((r + 1.0) * (r + 2.0)),
            RefDist::BinomSym { m, a } => {
                let mut coef = 1.0f64;
                let mut acc = 0.0;
                for k in 0..=m {
                    if k > 0 {
                        coef *= (m - k + 1) as f64 / k as f64;
                    }
                    let x = a * (2.0 * k as f64 - m as f64);
                    acc += coef * crate::cf_core::abs_pow(x, r);
                }
                acc / 2f64.powi(m as i32)
            }
            RefDist::SymPoisson { lambda } => {
                let kmax = (lambda + 12.0 * lambda.sqrt() + 40.0).ceil() as usize;
                let mut pmf = Vec::with_capacity(kmax + 1);
                let mut p = (-lambda).exp();
                for k in 0..=kmax {
                    if k > 0 {
                        p *= lambda / k as f64;
                    }
                    pmf.push(p);
                }
                // P(N₁ - N₂ = d) = Σ_i p_i p_{i+d}; symmetric in d.
                let mut acc = 0.0;
                for d in 1..=kmax {
                    let prob: f64 = (0..=kmax - d).map(|i| pmf[i] * pmf[i + d]).sum();
                    acc += 2.0 * prob * (d as f64).powf(r);
                }
                acc
            }
        }
    }

    /// Population moments in the layout used by the moment-radius bounds.
    pub fn moment_set(&self, extra_orders: &[f64]) -> Result<MomentSet> {
        let mut set = MomentSet::new(
            self.sigma2(),
            self.abs_moment(4.0),
            self.abs_moment(5.0),
            self.abs_moment(10.0),
        )?;
        for &r in extra_orders {
            if set.abs_moment(r).is_none() {
                set.a_frac.push((r, self.abs_moment(r)));
            }
        }
        Ok(set)
    }

    fn draw(&self, rng: &mut CounterRng, spare: &mut Option<f64>) -> f64 {
        match *self {
            RefDist::Gaussian { sigma } => {
                if let Some(z) = spare.take() {
                    return sigma * z;
                }
                let (z1, z2) = rng.normal_pair();
                *spare = Some(z2);
                sigma * z1
            }
            RefDist::SymPoisson { lambda } => {
                rng.poisson(lambda) as f64 - rng.poisson(lambda) as f64
            }
            RefDist::Laplace { b } => {
                let u = rng.uniform() - 0.5;
                -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            RefDist::Uniform { a } => a * (2.0 * rng.uniform() - 1.0),
            RefDist::Rademacher { a } => {
                if rng.next_u64() >> 63 == 1 {
                    a
                } else {
                    -a
                }
            }
            RefDist::BinomSym { m, a } => {
                let mut acc = 0.0;
                let mut bits = 0u64;
                for i in 0..m {
                    if i % 64 == 0 {
                        bits = rng.next_u64();
                    }
                    acc += if (bits >> (i % 64)) & 1 == 1 { a } else { -a };
                }
                acc
            }
            RefDist::Triangular { a } => a * (rng.uniform() + rng.uniform() - 1.0),
        }
    }

    /// `n` i.i.d. draws, a pure function of `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        self.validate()?;
        if n < 1 {
            return invalid("sample size must be at least 1");
        }
        let mut rng = CounterRng::new(seed).stream(self.index());
        let mut spare = None;
        let values = (0..n).map(|_| self.draw(&mut rng, &mut spare)).collect();
        Sample::new(values)
            .map_err(|e| Error::NumericFailure(format!("sampler produced invalid data: {e}")))
    }
}

impl CharFn for RefDist {
    fn cf(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 1.0;
        }
        match *self {
            RefDist::Gaussian { sigma } => (-sigma * sigma * t * t / 2.0).exp(),
            RefDist::SymPoisson { lambda } => (2.0 * lambda * (t.cos() - 1.0)).exp(),
            RefDist::Laplace { b } => 1.0 / (1.0 + b * b * t * t),
            RefDist::Uniform { a } => sinc(a * t),
            RefDist::Rademacher { a } => (a * t).cos(),
            RefDist::BinomSym { m, a } => (a * t).cos().powi(m as i32),
            RefDist::Triangular { a } => {
                let s = sinc(a * t / 2.0);
                s * s
            }
        }
    }

    fn ln_cf(&self, t: f64) -> f64 {
        match *self {
            RefDist::Gaussian { sigma } => -sigma * sigma * t * t / 2.0,
            // cos t - 1 = -2 sin²(t/2) without cancellation
            RefDist::SymPoisson { lambda } => {
                let s = (t / 2.0).sin();
                -4.0 * lambda * s * s
            }
            RefDist::Laplace { b } => -(b * b * t * t).ln_1p(),
            _ => self.cf(t).ln(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_core::{make_grid, moments};
    use std::f64::consts::PI;

    #[test]
    fn registry_contents() {
        let reg = registry();
        assert_eq!(reg.len(), 7);
        let names: Vec<_> = reg.iter().map(|d| d.name()).collect();
        assert_eq!(names, REGISTRY_NAMES);
        assert_eq!(reg[0].divisibility(), Divisibility::InfinitelyDivisible);
        assert_eq!(
            RefDist::by_name("uniform").unwrap().divisibility(),
            Divisibility::NotId
        );
        let b3 = RefDist::BinomSym { m: 3, a: 0.5 };
        assert_eq!(b3.divisibility(), Divisibility::MDivisible(3));
        assert!((b3.cf(0.9) - (0.45f64).cos().powi(3)).abs() < 1e-15);
        assert!(RefDist::by_name("cauchy").is_err());
    }

    #[test]
    fn cf_values() {
        let g = make_grid(PI, 2).unwrap();
        assert!((RefDist::Gaussian { sigma: 1.0 }.cf(1.0) - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(RefDist::Uniform { a: 1.0 }.cf_eval(&g)[1].abs() < 1e-15);
        // N₁ - N₂ with Poisson(1) parts: exp(2λ(cos π - 1)) = e^{-4}
        let sp = RefDist::SymPoisson { lambda: 1.0 }.cf_eval(&g)[1];
        assert!((sp - (-4.0f64).exp()).abs() < 1e-15);
        for d in registry() {
            assert_eq!(d.cf(0.0), 1.0);
            for k in 1..200 {
                let t = 0.05 * k as f64;
                assert!(d.cf(t).abs() <= 1.0);
                assert_eq!(d.cf(t), d.cf(-t));
                let v = d.cf(t);
                if v > 0.0 {
                    assert!((d.ln_cf(t) - v.ln()).abs() < 1e-12 * v.ln().abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn variance_matches_cf_curvature() {
        for d in registry() {
            let h = 1e-4;
            let curv = 2.0 * (1.0 - d.cf(h)) / (h * h);
            assert!(
                (curv - d.sigma2()).abs() < 1e-5 * d.sigma2().max(1.0),
                "{}",
                d.name()
            );
            assert!(
                (d.abs_moment(2.0) - d.sigma2()).abs() < 1e-10,
                "{}",
                d.name()
            );
        }
    }

    #[test]
    fn sampling_contracts() {
        let r = RefDist::by_name("rademacher").unwrap();
        let s = r.sample(4, 17).unwrap();
        assert!(s.values().iter().all(|v| *v == 1.0 || *v == -1.0));
        for d in registry() {
            assert_eq!(d.sample(50, 3).unwrap(), d.sample(50, 3).unwrap());
            assert_ne!(d.sample(50, 3).unwrap(), d.sample(50, 4).unwrap());
        }
        assert!(r.sample(0, 1).is_err());
        assert!(RefDist::SymPoisson { lambda: 40.0 }.sample(5, 1).is_err());
    }

    #[test]
    fn large_sample_moments() {
        let g = RefDist::by_name("gaussian")
            .unwrap()
            .sample(100_000, 8)
            .unwrap();
        assert!((g.variance().unwrap() - 1.0).abs() < 0.05);
        for d in registry() {
            let s = d.sample(100_000, 21).unwrap();
            let m = moments(&s, &[0.5], false).unwrap();
            let want = d.abs_moment(0.5);
            assert!(
                (m.abs_moment(0.5).unwrap() - want).abs() < 0.02 * want,
                "{}",
                d.name()
            );
            assert!(
                (s.variance().unwrap() - d.sigma2()).abs() < 0.05 * d.sigma2(),
                "{}",
                d.name()
            );
        }
    }

    #[test]
    fn sympoisson_moments_by_enumeration() {
        // E(N₁ - N₂)² = 2λ and E(N₁ - N₂)⁴ = 2λ + 12λ²
        let d = RefDist::SymPoisson { lambda: 1.7 };
        assert!((d.abs_moment(2.0) - 3.4).abs() < 1e-12);
        assert!((d.abs_moment(4.0) - (3.4 + 12.0 * 1.7 * 1.7)).abs() < 1e-10);
    }
}
