use alloc::vec::Vec;

use crate::event::{Nanos, NS_PER_MS};

use super::MacError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    Safety,
    Ar,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Safety => "safety",
            ClassKind::Ar => "ar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrafficClass {
    pub kind: ClassKind,
    pub generation_period: Nanos,
    /// Maximum service interval; a packet older than this is late.
    pub msi: Nanos,
    pub payload_bytes: u32,
}

/// Calibrated AR burst: reproduces the HCCA reference-scheduler capacity
/// crossover with the default PHY.
pub const AR_BURST_BYTES: u32 = 3_900;

impl TrafficClass {
    /// Cyclic sign-of-life traffic: 64 bytes every 8 ms, MSI 8 ms.
    pub fn safety() -> Self {
        Self {
            kind: ClassKind::Safety,
            generation_period: 8 * NS_PER_MS,
            msi: 8 * NS_PER_MS,
            payload_bytes: 64,
        }
    }

    /// AR offload: one burst per 50 ms MSI.
    pub fn ar() -> Self {
        Self {
            kind: ClassKind::Ar,
            generation_period: 50 * NS_PER_MS,
            msi: 50 * NS_PER_MS,
            payload_bytes: AR_BURST_BYTES,
        }
    }

    pub fn validate(&self) -> Result<(), MacError> {
        if self.msi == 0 {
            return Err(MacError::Traffic("msi must be positive"));
        }
        if self.generation_period == 0 {
            return Err(MacError::Traffic("generation period must be positive"));
        }
        if self.payload_bytes == 0 {
            return Err(MacError::Traffic("payload must be positive"));
        }
        Ok(())
    }

    /// MSDU sizes a burst is split into.
    pub fn fragments(&self, max_msdu: u32) -> Vec<u32> {
        let mut left = self.payload_bytes;
        let mut out = Vec::new();
        while left > 0 {
            let take = left.min(max_msdu);
            out.push(take);
            left -= take;
        }
        out
    }

    /// Nominal MSDU size declared in the flow's TSPEC.
    pub fn nominal_msdu(&self, max_msdu: u32) -> u32 {
        self.payload_bytes.min(max_msdu)
    }
}
