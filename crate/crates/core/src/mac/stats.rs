use alloc::vec::Vec;

use crate::event::{Nanos, TraceRecord, NS_PER_MS};

use super::traffic::ClassKind;

/// Latency summary for one traffic class.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassStats {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub queued_at_end: u64,
    /// Delivered late, dropped, or still queued past the MSI at the end of the run.
    pub deadline_misses: u64,
    pub mean_delay_ns: f64,
    /// Largest generation-to-ACK delay. Packets still queued past their MSI
    /// when the run ends contribute their age (a lower bound on their delay).
    pub max_delay_ns: Nanos,
    /// Mean generation-to-end-of-data-frame delay (no SIFS/ACK).
    pub mean_access_ns: f64,
}

impl ClassStats {
    pub fn samples(&self) -> u64 {
        self.delivered
    }

    pub fn mean_ms(&self) -> f64 {
        self.mean_delay_ns / NS_PER_MS as f64
    }

    pub fn max_ms(&self) -> f64 {
        self.max_delay_ns as f64 / NS_PER_MS as f64
    }

    pub fn miss_rate(&self) -> f64 {
        if self.generated == 0 {
            0.0
        } else {
            self.deadline_misses as f64 / self.generated as f64
        }
    }

    /// generated = delivered + dropped + queued
    pub fn is_conserved(&self) -> bool {
        self.generated == self.delivered + self.dropped + self.queued_at_end
    }
}

/// Result of one channel-access run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LatencyStats {
    pub safety: ClassStats,
    pub ar: ClassStats,
    /// Transmission attempts that overlapped another transmission.
    pub collisions: u64,
    /// Stations the HCCA reference scheduler could not fit into its service interval.
    pub rejected_stations: Vec<u32>,
    /// Event trace, when the scenario asked for one.
    pub trace: Vec<TraceRecord>,
}

impl LatencyStats {
    pub fn class(&self, kind: ClassKind) -> &ClassStats {
        match kind {
            ClassKind::Safety => &self.safety,
            ClassKind::Ar => &self.ar,
        }
    }

    pub fn admission_failed(&self) -> bool {
        !self.rejected_stations.is_empty()
    }
}

#[derive(Debug, Default, Clone)]
pub(crate) struct Accumulator {
    generated: u64,
    delivered: u64,
    dropped: u64,
    misses: u64,
    sum_delay: u128,
    max_delay: Nanos,
    sum_access: u128,
}

impl Accumulator {
    pub(crate) fn generated(&mut self, n: u64) {
        self.generated += n;
    }

    pub(crate) fn delivered(&mut self, delay: Nanos, access: Nanos, msi: Nanos) {
        self.delivered += 1;
        self.sum_delay += delay as u128;
        self.sum_access += access as u128;
        self.max_delay = self.max_delay.max(delay);
        if delay > msi {
            self.misses += 1;
        }
    }

    pub(crate) fn dropped(&mut self) {
        self.dropped += 1;
        self.misses += 1;
    }

    /// `ages` are the ages of packets still queued when the run ends.
    pub(crate) fn finish(&self, ages: &[Nanos], msi: Nanos) -> ClassStats {
        let mut max_delay = self.max_delay;
        let mut misses = self.misses;
        for &age in ages {
            if age > msi {
                misses += 1;
                max_delay = max_delay.max(age);
            }
        }
        let (mean, access) = if self.delivered == 0 {
            (0.0, 0.0)
        } else {
            (
                self.sum_delay as f64 / self.delivered as f64,
                self.sum_access as f64 / self.delivered as f64,
            )
        };
        ClassStats {
            generated: self.generated,
            delivered: self.delivered,
            dropped: self.dropped,
            queued_at_end: ages.len() as u64,
            deadline_misses: misses,
            mean_delay_ns: mean,
            max_delay_ns: max_delay,
            mean_access_ns: access,
        }
    }
}
