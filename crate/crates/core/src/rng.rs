//! Seeded random streams.
//!
//! Every stream is a PCG-XSL-RR 128/64 generator (`rand_pcg::Pcg64`, an LCG
//! with multiplier `0x2360ed051fc65da44385df649fccf645` and a 128-bit output
//! permutation). A master seed is expanded with SplitMix64 and each
//! `(seed, stream_id)` pair selects a distinct LCG increment, so independent
//! streams never depend on the order in which they are created.

use rand::{Rng as _, RngCore};
use rand_distr::{Distribution, StandardNormal};
use rand_pcg::Pcg64;

use crate::Complex64;

/// SplitMix64 finaliser (Steele, Lea & Flood constants).
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic random stream.
#[derive(Debug, Clone)]
pub struct SimRng {
    inner: Pcg64,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `id` under master `seed`.
    pub fn stream(seed: u64, id: u64) -> Self {
        let a = splitmix64(seed);
        let b = splitmix64(a ^ 0x5851_f42d_4c95_7f2d);
        let state = ((a as u128) << 64) | b as u128;
        let c = splitmix64(id.wrapping_add(0x1405_7b7e_f767_814f));
        let d = splitmix64(c ^ seed);
        let inc = ((c as u128) << 64) | d as u128;
        Self {
            inner: Pcg64::new(state, inc),
        }
    }

    /// Child stream derived from this stream's master seed and a label.
    pub fn fork(&mut self, id: u64) -> Self {
        let s = self.next_u64();
        Self::stream(s, id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        self.inner.gen_range(lo..=hi)
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    pub fn bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Circularly-symmetric complex Gaussian with total variance `var`.
    pub fn complex_normal(&mut self, var: f64) -> Complex64 {
        let s = crate::math::sqrt(var / 2.0);
        Complex64::new(s * self.normal(), s * self.normal())
    }
}
