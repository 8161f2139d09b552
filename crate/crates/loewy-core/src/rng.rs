//! Minimal deterministic PRNG (splitmix64) for sample-point generation.
//!
//! Reproducibility across platforms and versions matters more than
//! statistical strength here: a seed fully fixes every sample set.

use crate::scalar::Complex64;
use num_traits::Float;

/// splitmix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Area-uniform point in the annulus `r_min <= |z - center| <= r_max`.
    pub fn annulus(&mut self, center: Complex64, r_min: f64, r_max: f64) -> Complex64 {
        let t = self.next_f64();
        let r = Float::sqrt(r_min * r_min + t * (r_max * r_max - r_min * r_min));
        let theta = self.uniform(0.0, 2.0 * core::f64::consts::PI);
        center + Complex64::from_polar(r, theta)
    }
}
