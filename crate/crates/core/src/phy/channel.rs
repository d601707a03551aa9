use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cis, db_to_lin, sqrt, PI};
use crate::rng::SimRng;
use crate::Complex64;

/// Sample-level channel: integer delay, FIR multipath, carrier offset and
/// AWGN, applied in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    /// FIR taps; empty means a single unit tap.
    pub taps: Vec<Complex64>,
    /// Scale the taps to unit energy before use.
    pub normalize: bool,
    /// SNR per unit-energy data symbol (Es/N0), dB. `None` is noiseless.
    pub snr_db: Option<f64>,
    /// Carrier offset in subcarrier spacings (1/K cycles per sample).
    pub cfo: f64,
    /// Leading silence, samples.
    pub delay: usize,
}

impl ChannelModel {
    pub fn ideal() -> Self {
        Self {
            taps: Vec::new(),
            normalize: false,
            snr_db: None,
            cfo: 0.0,
            delay: 0,
        }
    }

    pub fn awgn(snr_db: f64) -> Self {
        Self {
            snr_db: Some(snr_db),
            ..Self::ideal()
        }
    }

    pub fn multipath(taps: Vec<Complex64>, snr_db: Option<f64>) -> Self {
        Self {
            taps,
            normalize: true,
            snr_db,
            ..Self::ideal()
        }
    }

    pub fn with_cfo(mut self, cfo: f64) -> Self {
        self.cfo = cfo;
        self
    }

    pub fn with_delay(mut self, delay: usize) -> Self {
        self.delay = delay;
        self
    }

    /// Effective taps after optional normalization.
    pub fn effective_taps(&self) -> Vec<Complex64> {
        if self.taps.is_empty() {
            return vec![Complex64::new(1.0, 0.0)];
        }
        let e: f64 = self.taps.iter().map(|t| t.norm_sqr()).sum();
        if self.normalize && e > 0.0 {
            let s = 1.0 / sqrt(e);
            self.taps.iter().map(|t| t * s).collect()
        } else {
            self.taps.clone()
        }
    }

    /// Complex noise variance per sample.
    pub fn noise_variance(&self) -> f64 {
        self.snr_db.map_or(0.0, |s| 1.0 / db_to_lin(s))
    }

    /// Passes `x` through the channel. `k` sets the subcarrier spacing used
    /// for the CFO. Output length is `delay + x.len() + taps - 1`.
    pub fn apply(&self, x: &[Complex64], k: usize, rng: &mut SimRng) -> Vec<Complex64> {
        let taps = self.effective_taps();
        let len = self.delay + x.len() + taps.len() - 1;
        let mut y = vec![Complex64::new(0.0, 0.0); len];
        for (i, v) in x.iter().enumerate() {
            for (l, t) in taps.iter().enumerate() {
                y[self.delay + i + l] += v * t;
            }
        }
        if self.cfo != 0.0 {
            let w = 2.0 * PI * self.cfo / k as f64;
            for (n, v) in y.iter_mut().enumerate() {
                *v *= cis(w * n as f64);
            }
        }
        let var = self.noise_variance();
        if var > 0.0 {
            for v in y.iter_mut() {
                *v += rng.complex_normal(var);
            }
        }
        y
    }
}
