//! Counter-based, splittable pseudorandom generator.
//!
//! Every draw is a pure function of `(key, counter)`:
//!
//! ```text
//! output(key, i) = mix64(key + i * 0x9E3779B97F4A7C15)   (wrapping arithmetic)
//! mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!            z ^ (z >> 31)
//! ```
//!
//! A seed maps to a key through `mix64(seed ^ 0x6A09E667F3BCC908)`, and an
//! independent stream is derived with `key' = mix64(key ^ mix64(id + γ))`.
//! Monte Carlo work assigns one stream per task index, so the numbers a task
//! sees never depend on scheduling or thread count.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x6A09_E667_F3BC_C908;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ SEED_SALT),
            counter: 0,
        }
    }

    /// Child stream `id`. Does not advance `self`.
    pub fn stream(&self, id: u64) -> Self {
        Self {
            key: mix64(self.key ^ mix64(id.wrapping_add(GOLDEN_GAMMA))),
            counter: 0,
        }
    }

    /// Child stream addressed by a path of ids, e.g. `[dist, n, rep]`.
    pub fn stream_path(&self, ids: &[u64]) -> Self {
        ids.iter().fold(self.clone(), |rng, &id| rng.stream(id))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        );
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform on [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform on (0, 1].
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform integer in `0..n` (Lemire multiply-shift; bias below 2^-64 * n).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Pair of independent standard normals by Box–Muller.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open0();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (radius * c, radius * s)
    }

    /// Poisson draw by sequential inversion. Intended for `lambda <= 30`.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        let u = self.uniform();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u >= cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            // cdf stalls below 1 by rounding in the far tail
            if p == 0.0 {
                break;
            }
        }
        k
    }
}
