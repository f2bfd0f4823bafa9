//! Reproducible random stream used by the instance generator and the Monte
//! Carlo validators.
//!
//! The stream is ChaCha20 (IETF variant, as implemented by the `rand_chacha`
//! crate) keyed from a 64-bit seed: the seed is written little-endian into the
//! first 8 bytes of the 256-bit key and the remaining 24 bytes are zero. All
//! derived quantities are defined in terms of the raw `u64` output sequence of
//! that generator, so any implementation of ChaCha20 reproduces them:
//!
//! * uniform in `[0, 1)`: `(next_u64() >> 11) * 2^-53`
//! * standard normals: Box-Muller on two consecutive uniforms, with
//!   `u1 = ((next_u64() >> 11) + 1) * 2^-53` in `(0, 1]` and `u2` uniform in
//!   `[0, 1)`; the pair `(r cos(2*pi*u2), r sin(2*pi*u2))` with
//!   `r = sqrt(-2 ln u1)` is consumed in order, one value per call, the second
//!   held in a one-slot cache.
//!
//! Callers that need a documented draw order (the generator fills B
//! column-major, then C, then the target vectors, then the noise) simply issue
//! calls against one stream in that order.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_NEG53: f64 = 1.0 / (1u64 << 53) as f64;

/// A seeded ChaCha20-backed stream of uniforms and Box-Muller normals.
pub struct SeededStream {
    rng: ChaCha20Rng,
    cached_normal: Option<f64>,
}

impl SeededStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        SeededStream {
            rng: ChaCha20Rng::from_seed(key),
            cached_normal: None,
        }
    }

    /// Next raw 64-bit word of the stream.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`. Bypasses the normal cache.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_NEG53
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller; consumes two `u64` words per pair.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * TWO_NEG53; // (0, 1]
        let u2 = (self.next_u64() >> 11) as f64 * TWO_NEG53; // [0, 1)
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Fills a slice with normals, in order.
    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.normal();
        }
    }
}

/// Stable 64-bit seed derivation for sub-streams (per-trial, per-cell).
///
/// SHA-256 over the ASCII label, first 8 digest bytes interpreted
/// little-endian. The label formats are documented at each call site so the
/// mapping is reproducible outside this crate.
pub fn derive_seed(label: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(label.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}
