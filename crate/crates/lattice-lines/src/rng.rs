//! Deterministic, splittable random sampling shared by all simulation code.
//!
//! Every random quantity in the crate flows through a [`SeededStream`]: a
//! ChaCha8 generator addressed by `(seed, substream_id)`. Identical
//! addresses give identical sequences; distinct substream ids give
//! statistically independent streams without any coordination. Per-site and
//! per-trial streams are derived by mixing indices into a substream id, so
//! a simulation can be replayed piecewise (e.g. the instruction stack of a
//! single site) without regenerating anything else.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mixes a list of integers into a single substream id.
///
/// SplitMix64 finalizer applied as a chained hash. Stable across versions:
/// changing this function changes every derived stream, so it never should.
pub fn substream_id(parts: &[u64]) -> u64 {
    let mut acc: u64 = 0x243f_6a88_85a3_08d3; // arbitrary fixed offset
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A deterministic random stream addressed by `(seed, substream_id)`.
#[derive(Debug, Clone)]
pub struct SeededStream {
    seed: u64,
    substream: u64,
    rng: ChaCha8Rng,
}

impl SeededStream {
    pub fn new(seed: u64, substream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(substream);
        SeededStream {
            seed,
            substream,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn substream_id(&self) -> u64 {
        self.substream
    }

    /// A fresh stream with the same root seed and the given substream id.
    pub fn substream(&self, id: u64) -> SeededStream {
        SeededStream::new(self.seed, id)
    }

    /// A fresh stream whose substream id is derived from this stream's id
    /// and the given index parts. Used for per-site / per-trial splitting.
    pub fn derive(&self, parts: &[u64]) -> SeededStream {
        let mut all = Vec::with_capacity(parts.len() + 1);
        all.push(self.substream);
        all.extend_from_slice(parts);
        SeededStream::new(self.seed, substream_id(&all))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in the half-open interval (0, 1].
    ///
    /// The +1 offset keeps 0 out of the support so `ln` is always finite;
    /// this is the guard required by inversion sampling.
    pub fn uniform_open01(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        (((self.rng.next_u64() >> 11) + 1) as f64) / DEN
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Lemire-style rejection to avoid modulo bias.
        let mut x = self.rng.next_u64();
        let mut m = (x as u128).wrapping_mul(n as u128);
        let mut lo = m as u64;
        if lo < n {
            let t = n.wrapping_neg() % n;
            while lo < t {
                x = self.rng.next_u64();
                m = (x as u128).wrapping_mul(n as u128);
                lo = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

/// Geometric law with mass `(1-λ)·λ^k`, k = 0, 1, 2, …; mean λ/(1-λ).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeometricLaw {
    lambda: f64,
}

impl GeometricLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_nan() || lambda <= 0.0 || lambda >= 1.0 {
            return Err(Error::parameter(format!(
                "geometric parameter must lie in (0,1), got {lambda}"
            )));
        }
        Ok(GeometricLaw { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mean(&self) -> f64 {
        self.lambda / (1.0 - self.lambda)
    }

    pub fn mass(&self, k: u64) -> f64 {
        (1.0 - self.lambda) * self.lambda.powi(k as i32)
    }

    pub fn sample(&self, stream: &mut SeededStream) -> u64 {
        sample_geometric(stream, self)
    }
}

/// Exponential law with rate α; mean 1/α.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExponentialLaw {
    alpha: f64,
}

impl ExponentialLaw {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::parameter(format!(
                "exponential rate must be positive, got {alpha}"
            )));
        }
        Ok(ExponentialLaw { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean(&self) -> f64 {
        1.0 / self.alpha
    }

    pub fn sample(&self, stream: &mut SeededStream) -> f64 {
        sample_exponential(stream, self)
    }
}

/// Poisson law with mean μ ≥ 0; mass e^{-μ} μ^n / n!.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoissonLaw {
    mu: f64,
}

impl PoissonLaw {
    pub fn new(mu: f64) -> Result<Self> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::parameter(format!(
                "poisson mean must be nonnegative, got {mu}"
            )));
        }
        Ok(PoissonLaw { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sample(&self, stream: &mut SeededStream) -> u64 {
        sample_poisson(stream, self)
    }
}

/// Inversion sampler: k = ⌊ln U / ln λ⌋ with U uniform on (0, 1].
pub fn sample_geometric(stream: &mut SeededStream, law: &GeometricLaw) -> u64 {
    let u = stream.uniform_open01();
    if u >= 1.0 {
        return 0;
    }
    let k = (u.ln() / law.lambda.ln()).floor();
    k as u64
}

pub fn sample_exponential(stream: &mut SeededStream, law: &ExponentialLaw) -> f64 {
    -stream.uniform_open01().ln() / law.alpha
}

/// Product-of-uniforms sampler. For large means the draw is split into
/// chunks of at most 500 so e^{-μ} never underflows.
pub fn sample_poisson(stream: &mut SeededStream, law: &PoissonLaw) -> u64 {
    let mut remaining = law.mu;
    let mut total = 0u64;
    while remaining > 0.0 {
        let chunk = remaining.min(500.0);
        remaining -= chunk;
        let limit = (-chunk).exp();
        let mut prod = stream.uniform_open01();
        while prod > limit {
            total += 1;
            prod *= stream.uniform_open01();
        }
    }
    total
}
