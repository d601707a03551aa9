use alloc::vec::Vec;

use super::config::GfdmConfig;
use super::PhyError;
use crate::math::{atan2, PI};
use crate::Complex64;

/// Minimum mean timing metric over the plateau for a detection.
pub const DETECTION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    /// Index of the first frame sample (start of the preamble's CP).
    pub frame_start: usize,
    /// Carrier offset in subcarrier spacings (1/K cycles per sample).
    pub cfo: f64,
    /// Mean timing metric over the detected plateau.
    pub metric: f64,
}

/// Schmidl-Cox timing and frequency estimate.
///
/// With half-length `L`, `P(d) = sum r*[d+i] r[d+i+L]` and
/// `R(d) = sum (|r[d+i]|^2 + |r[d+i+L]|^2) / 2` for `i < L`, and the metric
/// is `|P|^2 / R^2`. Averaging both halves in `R` keeps the metric at or
/// below 1, with equality only where the halves repeat.
/// A noiseless preamble with its CP and CS yields a flat plateau of
/// `cp + cs + 1` samples; the plateau is resolved by taking the window of
/// that length with the largest metric sum, whose first index is the frame
/// start. The CFO comes from the phase of `P` summed over the same window.
pub fn schmidl_cox_sync(rx: &[Complex64], config: &GfdmConfig) -> Result<SyncResult, PhyError> {
    let len = config.preamble_len();
    let half = len / 2;
    if rx.len() < len || half == 0 {
        return Err(PhyError::NoFrame);
    }
    let positions = rx.len() - len + 1;
    let mut p = Vec::with_capacity(positions);
    let mut metric = Vec::with_capacity(positions);
    for d in 0..positions {
        let mut pd = Complex64::new(0.0, 0.0);
        let mut rd = 0.0;
        for i in 0..half {
            let (a, b) = (rx[d + i], rx[d + i + half]);
            pd += a.conj() * b;
            rd += 0.5 * (a.norm_sqr() + b.norm_sqr());
        }
        p.push(pd);
        metric.push(if rd > 0.0 { pd.norm_sqr() / (rd * rd) } else { 0.0 });
    }
    let w = (config.cp_len + config.cs_len + 1).min(positions);
    let mut sum: f64 = metric[..w].iter().sum();
    let (mut best, mut best_sum) = (0usize, sum);
    for d in 1..=positions - w {
        sum += metric[d + w - 1] - metric[d - 1];
        if sum > best_sum + 1e-12 {
            best = d;
            best_sum = sum;
        }
    }
    // Recompute the winning window directly to shed accumulated rounding.
    let mean = metric[best..best + w].iter().sum::<f64>() / w as f64;
    if mean < DETECTION_THRESHOLD {
        return Err(PhyError::NoFrame);
    }
    let pw: Complex64 = p[best..best + w].iter().sum();
    Ok(SyncResult {
        frame_start: best,
        cfo: atan2(pw.im, pw.re) / (PI * config.m as f64),
        metric: mean,
    })
}
