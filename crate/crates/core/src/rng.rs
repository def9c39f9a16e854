//! Seeded, splittable random streams.
//!
//! A [`Seed`] is a `(root, stream)` pair. The root becomes the ChaCha8 key and
//! the stream index becomes its 64-bit nonce, so every `(root, stream)` pair
//! names an independent counter-based sequence that is identical on every
//! platform. Parallel trials derive their own sub-streams with
//! [`Seed::child`], which makes results independent of scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Root seed plus sub-stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub root: u64,
    pub stream: u64,
}

// splitmix64 constants (Steele, Lea & Flood).
const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const MIX_MUL_1: u64 = 0xbf58_476d_1ce4_e5b9;
const MIX_MUL_2: u64 = 0x94d0_49bb_1331_11eb;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

impl Seed {
    pub const fn new(root: u64) -> Self {
        Self { root, stream: 0 }
    }

    pub const fn with_stream(root: u64, stream: u64) -> Self {
        Self { root, stream }
    }

    /// Deterministic sub-stream for the `index`-th child (trial, sweep value,
    /// experiment) of this seed. Same root, mixed stream index.
    pub fn child(&self, index: u64) -> Seed {
        Seed {
            root: self.root,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_mul(MIX_MUL_1))),
        }
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::new(*self)
    }
}

/// A ChaCha8 stream with uniform and Gaussian helpers.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
    spare_gaussian: Option<f64>,
}

const INV_2_POW_53: f64 = 1.0 / (1u64 << 53) as f64;

impl StreamRng {
    pub fn new(seed: Seed) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.root.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(seed.stream);
        Self {
            inner,
            spare_gaussian: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * INV_2_POW_53
    }

    /// Uniform on the open interval `(0, 1)`: the 53-bit grid shifted by half
    /// a step, so neither endpoint is reachable.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * INV_2_POW_53
    }

    /// Standard normal variate by the Marsaglia polar method.
    ///
    /// Draws `(u, w)` uniform on `[-1, 1)^2` until `0 < s = u^2 + w^2 < 1`,
    /// then returns `u * sqrt(-2 ln s / s)` and caches `w * sqrt(-2 ln s / s)`
    /// for the next call.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(g) = self.spare_gaussian.take() {
            return g;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let w = 2.0 * self.uniform() - 1.0;
            let s = u * u + w * w;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_gaussian = Some(w * f);
                return u * f;
            }
        }
    }

    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.gaussian();
        }
    }
}
