use crate::event::{Nanos, NS_PER_MS, NS_PER_US};

use super::MacError;

/// PHY timing. Defaults follow the 5 GHz OFDM PHY at 65 Mbit/s.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyParams {
    pub slot: Nanos,
    pub sifs: Nanos,
    pub difs: Nanos,
    pub pifs: Nanos,
    /// Data rate in kbit/s.
    pub data_rate_kbps: u64,
    pub ack_duration: Nanos,
    pub beacon_interval: Nanos,
    /// Preamble plus MAC header time added to every frame.
    pub per_frame_overhead: Nanos,
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
    /// Fragmentation threshold: bursts larger than this are split into
    /// several MSDUs.
    pub max_msdu_bytes: u32,
    pub beacon_bytes: u32,
}

impl Default for PhyParams {
    fn default() -> Self {
        Self {
            slot: 9 * NS_PER_US,
            sifs: 16 * NS_PER_US,
            difs: 34 * NS_PER_US,
            pifs: 25 * NS_PER_US,
            data_rate_kbps: 65_000,
            ack_duration: 44 * NS_PER_US,
            beacon_interval: 48 * NS_PER_MS,
            per_frame_overhead: 24 * NS_PER_US,
            cw_min: 15,
            cw_max: 1023,
            retry_limit: 7,
            max_msdu_bytes: 1000,
            beacon_bytes: 100,
        }
    }
}

impl PhyParams {
    pub fn validate(&self) -> Result<(), MacError> {
        if self.difs != self.sifs + 2 * self.slot {
            return Err(MacError::Phy("difs must equal sifs + 2 slot"));
        }
        if self.pifs != self.sifs + self.slot {
            return Err(MacError::Phy("pifs must equal sifs + slot"));
        }
        if self.data_rate_kbps == 0 {
            return Err(MacError::Phy("data rate must be positive"));
        }
        if self.cw_min == 0 || self.cw_min > self.cw_max {
            return Err(MacError::Phy("need 0 < cw_min <= cw_max"));
        }
        if self.max_msdu_bytes == 0 || self.beacon_interval == 0 {
            return Err(MacError::Phy("max_msdu_bytes and beacon_interval must be positive"));
        }
        Ok(())
    }

    /// Air time of a frame carrying `bytes` of payload.
    pub fn tx_time(&self, bytes: u32) -> Nanos {
        let bits = bytes as u64 * 8;
        self.per_frame_overhead + (bits * 1_000_000).div_ceil(self.data_rate_kbps)
    }

    /// Poll, QoS-null and other body-less frames.
    pub fn control_time(&self) -> Nanos {
        self.per_frame_overhead
    }

    pub fn beacon_time(&self) -> Nanos {
        self.tx_time(self.beacon_bytes)
    }

    /// Data frame plus its SIFS/ACK handshake and trailing SIFS.
    pub fn acked_exchange(&self, bytes: u32) -> Nanos {
        self.tx_time(bytes) + self.sifs + self.ack_duration + self.sifs
    }

    /// Poll frame and the SIFS before the response.
    pub fn poll_time(&self) -> Nanos {
        self.control_time() + self.sifs
    }

    /// Poll answered by a QoS-null, including the gap to the next frame.
    pub fn null_poll_time(&self) -> Nanos {
        self.poll_time() + self.control_time() + self.sifs
    }
}
