use alloc::vec::Vec;

use super::constellation::Constellation;
use super::PhyError;

/// Prototype filter family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse {
    RaisedCosine { rolloff: f64 },
    RootRaisedCosine { rolloff: f64 },
    /// Rectangular over one subsymbol (K samples); OFDM for M = 1.
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    MatchedFilter,
    ZeroForcing,
}

/// Block parameters. `active` lists the used subcarriers in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct GfdmConfig {
    pub k: usize,
    pub m: usize,
    pub active: Vec<usize>,
    pub pulse: Pulse,
    pub cp_len: usize,
    pub cs_len: usize,
    pub constellation: Constellation,
    pub receiver: Receiver,
    /// Raised-cosine edge taper over the first `window_len` prefix samples
    /// and the last `window_len` suffix samples of each block; 0 is off.
    pub window_len: usize,
}

impl GfdmConfig {
    /// All `k` subcarriers active, no guards, QPSK, zero forcing.
    pub fn new(k: usize, m: usize, pulse: Pulse) -> Self {
        Self {
            k,
            m,
            active: (0..k).collect(),
            pulse,
            cp_len: 0,
            cs_len: 0,
            constellation: Constellation::Qpsk,
            receiver: Receiver::ZeroForcing,
            window_len: 0,
        }
    }

    /// OFDM: one subsymbol, rectangular pulse.
    pub fn ofdm(k: usize) -> Self {
        Self::new(k, 1, Pulse::Rect)
    }

    pub fn with_guards(mut self, cp_len: usize, cs_len: usize) -> Self {
        self.cp_len = cp_len;
        self.cs_len = cs_len;
        self
    }

    pub fn with_constellation(mut self, c: Constellation) -> Self {
        self.constellation = c;
        self
    }

    pub fn with_receiver(mut self, r: Receiver) -> Self {
        self.receiver = r;
        self
    }

    pub fn with_window(mut self, window_len: usize) -> Self {
        self.window_len = window_len;
        self
    }

    pub fn with_active(mut self, active: Vec<usize>) -> Self {
        self.active = active;
        self
    }

    /// Samples per block.
    pub fn n(&self) -> usize {
        self.k * self.m
    }

    /// Data symbols per block.
    pub fn symbols_per_block(&self) -> usize {
        self.active.len() * self.m
    }

    pub fn bits_per_block(&self) -> usize {
        self.symbols_per_block() * self.constellation.bits_per_symbol()
    }

    /// Preamble length; equal to the block length.
    pub fn preamble_len(&self) -> usize {
        self.n()
    }

    pub fn frame_len(&self) -> usize {
        2 * (self.cp_len + self.cs_len) + self.preamble_len() + self.n()
    }

    pub fn validate(&self) -> Result<(), PhyError> {
        if self.k == 0 || self.m == 0 {
            return Err(PhyError::Config("K and M must be positive"));
        }
        if self.n() % 2 != 0 {
            return Err(PhyError::Config("K*M must be even for a two-half preamble"));
        }
        if self.active.is_empty() {
            return Err(PhyError::Config("no active subcarriers"));
        }
        if self.active.windows(2).any(|w| w[0] >= w[1]) || self.active.iter().any(|&k| k >= self.k) {
            return Err(PhyError::Config("active subcarriers must be ascending and below K"));
        }
        let guard = self.cp_len.max(self.cs_len);
        if guard > self.n() {
            return Err(PhyError::GuardTooLong { guard, n: self.n() });
        }
        if self.window_len > self.cs_len || 2 * self.window_len > self.cp_len {
            return Err(PhyError::Config("window must fit in the suffix and half the prefix"));
        }
        match self.pulse {
            Pulse::RaisedCosine { rolloff } | Pulse::RootRaisedCosine { rolloff } if !(0.0..=1.0).contains(&rolloff) => {
                Err(PhyError::Config("rolloff must lie in [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Configurations shipped with the crate and covered by the
    /// reconstruction checks; all are non-singular under zero forcing.
    pub fn shipped() -> Vec<(&'static str, GfdmConfig)> {
        use Constellation::*;
        alloc::vec![
            ("ofdm64", GfdmConfig::ofdm(64).with_guards(16, 0)),
            ("single_carrier", GfdmConfig::new(1, 64, Pulse::RaisedCosine { rolloff: 0.35 }).with_guards(8, 0)),
            ("gfdm_rc", GfdmConfig::new(32, 5, Pulse::RaisedCosine { rolloff: 0.5 }).with_guards(16, 8)),
            ("gfdm_rrc", GfdmConfig::new(16, 7, Pulse::RootRaisedCosine { rolloff: 0.3 }).with_guards(16, 0)),
            ("gfdm_rect_16qam", GfdmConfig::new(16, 4, Pulse::Rect).with_guards(8, 0).with_constellation(Qam16)),
            (
                "gfdm_rc_sparse_bpsk",
                GfdmConfig::new(32, 3, Pulse::RaisedCosine { rolloff: 0.2 })
                    .with_active((1..28).collect())
                    .with_guards(8, 4)
                    .with_constellation(Bpsk),
            ),
        ]
    }

    /// Algorithmic latency of one block and of one frame, in samples.
    pub fn latency(&self) -> LatencyReport {
        LatencyReport {
            block_samples: self.cp_len + self.n() + self.cs_len,
            frame_samples: self.frame_len(),
        }
    }
}

/// Sample-count latency; divide by the sample rate for seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatencyReport {
    pub block_samples: usize,
    pub frame_samples: usize,
}

impl LatencyReport {
    pub fn block_seconds(&self, sample_rate_hz: f64) -> f64 {
        self.block_samples as f64 / sample_rate_hz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_validate() {
        for (name, c) in GfdmConfig::shipped() {
            assert!(c.validate().is_ok(), "{name}");
        }
    }

    #[test]
    fn frame_length_arithmetic() {
        let c = GfdmConfig::new(8, 3, Pulse::Rect).with_guards(4, 2);
        assert_eq!(c.frame_len(), 2 * 6 + 24 + 24);
        assert_eq!(c.latency().block_samples, 30);
    }

    #[test]
    fn rejects_bad_active_set() {
        let c = GfdmConfig::ofdm(8).with_active(alloc::vec![3, 2]);
        assert!(c.validate().is_err());
        let c = GfdmConfig::ofdm(8).with_guards(4, 0).with_window(1);
        assert!(c.validate().is_err());
        let c = GfdmConfig::ofdm(8).with_guards(9, 0);
        assert_eq!(c.validate(), Err(PhyError::GuardTooLong { guard: 9, n: 8 }));
    }
}
