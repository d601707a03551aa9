use alloc::vec::Vec;

use super::config::GfdmConfig;
use super::PhyError;
use crate::math::{cos, sqrt, PI};
use crate::rng::SimRng;
use crate::Complex64;

/// Transmit frame: `[CP|preamble|CS][CP|payload|CS]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub samples: Vec<Complex64>,
    pub preamble_start: usize,
    pub payload_start: usize,
}

/// Preamble of `N` samples: a random QPSK half of `N/2` samples sent twice.
pub fn preamble(config: &GfdmConfig, seed: u64) -> Vec<Complex64> {
    let half = config.preamble_len() / 2;
    let mut rng = SimRng::stream(seed, 0x9ea);
    let s = 1.0 / sqrt(2.0);
    let a: Vec<Complex64> = (0..half)
        .map(|_| {
            let re = if rng.bit() { s } else { -s };
            let im = if rng.bit() { s } else { -s };
            Complex64::new(re, im)
        })
        .collect();
    let mut p = a.clone();
    p.extend_from_slice(&a);
    p
}

fn guarded(block: &[Complex64], cp: usize, cs: usize, window: usize, out: &mut Vec<Complex64>) {
    let n = block.len();
    let start = out.len();
    out.extend_from_slice(&block[n - cp..]);
    out.extend_from_slice(block);
    out.extend_from_slice(&block[..cs]);
    let end = out.len();
    for i in 0..window {
        let w = 0.5 * (1.0 - cos(PI * (i as f64 + 0.5) / window as f64));
        out[start + i] *= w;
        out[end - 1 - i] *= w;
    }
}

/// Attaches cyclic prefix and suffix to the preamble and the payload block.
pub fn build_frame(preamble: &[Complex64], payload: &[Complex64], config: &GfdmConfig) -> Result<Frame, PhyError> {
    let n = config.n();
    for (got, expected) in [(preamble.len(), config.preamble_len()), (payload.len(), n)] {
        if got != expected {
            return Err(PhyError::SampleCount { expected, got });
        }
    }
    let guard = config.cp_len.max(config.cs_len);
    if guard > n {
        return Err(PhyError::GuardTooLong { guard, n });
    }
    let (cp, cs, w) = (config.cp_len, config.cs_len, config.window_len);
    if w > cs || 2 * w > cp {
        return Err(PhyError::Config("window must fit in the suffix and half the prefix"));
    }
    let mut samples = Vec::with_capacity(config.frame_len());
    guarded(preamble, cp, cs, w, &mut samples);
    guarded(payload, cp, cs, w, &mut samples);
    Ok(Frame {
        samples,
        preamble_start: cp,
        payload_start: 2 * cp + cs + preamble.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Pulse;

    #[test]
    fn preamble_has_two_identical_halves() {
        let cfg = GfdmConfig::new(16, 3, Pulse::Rect);
        let p = preamble(&cfg, 4);
        assert_eq!(p.len(), 48);
        for i in 0..24 {
            assert_eq!(p[i], p[i + 24]);
        }
    }

    #[test]
    fn no_guards_concatenates() {
        let cfg = GfdmConfig::ofdm(8);
        let p = preamble(&cfg, 1);
        let x: Vec<_> = (0..8).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let f = build_frame(&p, &x, &cfg).unwrap();
        assert_eq!(&f.samples[..8], &p[..]);
        assert_eq!(&f.samples[8..], &x[..]);
    }

    #[test]
    fn prefix_copies_block_tail() {
        let cfg = GfdmConfig::ofdm(8).with_guards(4, 2);
        let p = preamble(&cfg, 1);
        let x: Vec<_> = (0..8).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let f = build_frame(&p, &x, &cfg).unwrap();
        assert_eq!(f.samples.len(), 2 * 6 + 8 + 8);
        assert_eq!(&f.samples[..4], &p[4..]);
        assert_eq!(&f.samples[12..14], &p[..2]);
        assert_eq!(&f.samples[f.payload_start..f.payload_start + 8], &x[..]);
        assert_eq!(&f.samples[f.payload_start - 4..f.payload_start], &x[4..]);
    }

    #[test]
    fn window_tapers_only_outer_guard_samples() {
        let plain = GfdmConfig::ofdm(8).with_guards(4, 2);
        let cfg = plain.clone().with_window(2);
        let p = preamble(&cfg, 1);
        let x: Vec<_> = (1..=8).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let a = build_frame(&p, &x, &plain).unwrap().samples;
        let b = build_frame(&p, &x, &cfg).unwrap().samples;
        let block = 14;
        for (i, (u, v)) in a.iter().zip(&b).enumerate() {
            let r = i % block;
            if r < 2 || r >= block - 2 {
                assert!(v.norm() < u.norm());
            } else {
                assert_eq!(u, v);
            }
        }
    }

    #[test]
    fn guard_longer_than_block_rejected() {
        let mut cfg = GfdmConfig::ofdm(8);
        cfg.cp_len = 9;
        let p = preamble(&GfdmConfig::ofdm(8), 1);
        assert_eq!(
            build_frame(&p, &p, &cfg),
            Err(PhyError::GuardTooLong { guard: 9, n: 8 })
        );
    }
}
