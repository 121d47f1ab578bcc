//! Deterministic, splittable random streams.
//!
//! A [`SeedSpec`] names a stream by a master seed and a lineage path such as
//! `[repetition, replicate]`. The path is hashed into a ChaCha key, so any
//! stream can be materialised directly without advancing its siblings.

use std::f64::consts::PI;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_path: Vec<u64>,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_path: Vec::new(),
        }
    }

    /// Child stream `child` of this one.
    pub fn derive(&self, child: u64) -> SeedSpec {
        let mut stream_path = self.stream_path.clone();
        stream_path.push(child);
        SeedSpec {
            master_seed: self.master_seed,
            stream_path,
        }
    }

    pub fn stream(&self) -> Stream {
        Stream::new(self)
    }

    /// Lineage path rendered as `a/b/c` (empty for the root).
    pub fn path_string(&self) -> String {
        self.stream_path
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join("/")
    }

    fn key(&self) -> [u8; 32] {
        let mut state = splitmix(self.master_seed ^ 0x6a09_e667_f3bc_c908);
        // Length is mixed in so that [] and [0] differ.
        state = splitmix(state ^ (self.stream_path.len() as u64).wrapping_mul(0x9e37_79b9));
        for &p in &self.stream_path {
            state =
                splitmix(state.rotate_left(23) ^ splitmix(p.wrapping_add(0xbb67_ae85_84ca_a73b)));
        }
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            state = splitmix(state.wrapping_add(i as u64));
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        key
    }
}

impl fmt::Display for SeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.stream_path.is_empty() {
            write!(f, "{}", self.master_seed)
        } else {
            write!(f, "{}:{}", self.master_seed, self.path_string())
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A materialised random stream. Owned by exactly one replicate.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: &SeedSpec) -> Self {
        Stream {
            rng: ChaCha8Rng::from_seed(seed.key()),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform01(&mut self) -> f64 {
        loop {
            let u = (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Fair coin.
    pub fn bernoulli_half(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }

    pub fn exponential(&mut self) -> f64 {
        -self.uniform01().ln()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn gamma(&mut self, shape: f64) -> Result<f64> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::domain(format!(
                "gamma shape must be positive, got {shape}"
            )));
        }
        let g = Gamma::new(shape, 1.0).map_err(|e| Error::domain(e.to_string()))?;
        // Tiny shapes can underflow to exactly zero; keep the support open.
        Ok(g.sample(&mut self.rng).max(f64::MIN_POSITIVE))
    }

    pub fn chi_squared(&mut self, df: u32) -> Result<f64> {
        if df == 0 {
            return Err(Error::domain(
                "chi-squared degrees of freedom must be positive",
            ));
        }
        let c = ChiSquared::new(f64::from(df)).map_err(|e| Error::domain(e.to_string()))?;
        Ok(c.sample(&mut self.rng).max(f64::MIN_POSITIVE))
    }

    /// Positive stable variate with Laplace transform `exp(-t^alpha)`,
    /// via the Chambers–Mallows–Stuck (Kanter) representation.
    pub fn positive_stable(&mut self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "stability index must lie in (0, 1], got {alpha}"
            )));
        }
        if alpha == 1.0 {
            return Ok(1.0);
        }
        let theta = PI * self.uniform01();
        let w = self.exponential();
        let a = (alpha * theta).sin() / theta.sin().powf(1.0 / alpha);
        let b = (((1.0 - alpha) * theta).sin() / w).powf((1.0 - alpha) / alpha);
        Ok((a * b).max(f64::MIN_POSITIVE))
    }

    /// Logarithmic (log-series) variate with `P(X = k) ∝ p^k / k`, Kemp's LK
    /// algorithm.
    pub fn log_series(&mut self, p: f64) -> Result<u64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "log-series p must lie in (0, 1), got {p}"
            )));
        }
        let h = (-p).ln_1p();
        let v = self.uniform01();
        if v >= p {
            return Ok(1);
        }
        let u = self.uniform01();
        let q = -(h * u).exp_m1();
        if v <= q * q {
            let k = 1.0 + v.ln() / q.ln();
            Ok(if k.is_finite() && k < u64::MAX as f64 {
                k.floor() as u64
            } else {
                u64::MAX
            })
        } else if v <= q {
            Ok(2)
        } else {
            Ok(1)
        }
    }
}
