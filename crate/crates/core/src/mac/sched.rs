//! HCCA schedulers.

use alloc::vec::Vec;

use crate::event::Nanos;

use super::params::PhyParams;
use super::traffic::TrafficClass;

/// Traffic specification a station registers with the hybrid coordinator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowSpec {
    pub station: u32,
    pub msi: Nanos,
    /// Bytes produced per `period`; mean rate is `burst_bytes / period`.
    pub burst_bytes: u32,
    pub period: Nanos,
    pub nominal_msdu: u32,
    pub max_msdu: u32,
}

impl FlowSpec {
    pub fn from_class(station: u32, class: &TrafficClass, phy: &PhyParams) -> Self {
        let frags = class.fragments(phy.max_msdu_bytes);
        Self {
            station,
            msi: class.msi,
            burst_bytes: class.payload_bytes,
            period: class.generation_period,
            nominal_msdu: class.nominal_msdu(phy.max_msdu_bytes),
            max_msdu: frags.iter().copied().max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxopGrant {
    pub station: u32,
    pub txop: Nanos,
}

/// Static polling table of the reference scheduler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTable {
    pub service_interval: Nanos,
    /// Admitted flows in polling order.
    pub grants: Vec<TxopGrant>,
    /// Flows that did not fit: they receive no reserved TXOP.
    pub rejected: Vec<TxopGrant>,
}

impl ScheduleTable {
    /// Polls, TXOPs and beacon reservation of the admitted flows.
    pub fn reserved(&self, phy: &PhyParams) -> Nanos {
        beacon_reserve(phy) + self.grants.iter().map(|g| phy.poll_time() + g.txop).sum::<Nanos>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("admission failure: {rejected} flow(s) exceed the {service_interval} ns service interval")]
pub struct AdmissionError {
    pub service_interval: Nanos,
    pub rejected: usize,
}

impl ScheduleTable {
    pub fn check_admission(&self) -> Result<(), AdmissionError> {
        if self.rejected.is_empty() {
            Ok(())
        } else {
            Err(AdmissionError {
                service_interval: self.service_interval,
                rejected: self.rejected.len(),
            })
        }
    }
}

/// Air time set aside at the start of a service interval for the beacon.
pub fn beacon_reserve(phy: &PhyParams) -> Nanos {
    phy.pifs + phy.beacon_time()
}

/// Largest submultiple of `beacon_interval` that does not exceed `min_msi`.
pub fn service_interval(beacon_interval: Nanos, min_msi: Nanos) -> Nanos {
    let k = beacon_interval.div_ceil(min_msi.max(1)).max(1);
    beacon_interval / k
}

/// TXOP for one service interval: enough acked exchanges of the nominal MSDU
/// to carry the mean rate over `si`, and never less than one maximum MSDU.
pub fn txop_duration(flow: &FlowSpec, si: Nanos, phy: &PhyParams) -> Nanos {
    let num = si as u128 * flow.burst_bytes as u128;
    let den = flow.period as u128 * flow.nominal_msdu.max(1) as u128;
    let n = num.div_ceil(den) as Nanos;
    (n * phy.acked_exchange(flow.nominal_msdu)).max(phy.acked_exchange(flow.max_msdu))
}

/// Builds the reference-scheduler table. Flows are admitted in the given
/// order while the beacon reservation plus every admitted poll and TXOP fits
/// within one service interval.
pub fn reference_scheduler(flows: &[FlowSpec], phy: &PhyParams, beacon_interval: Nanos) -> ScheduleTable {
    let min_msi = flows.iter().map(|f| f.msi).min().unwrap_or(beacon_interval);
    let si = service_interval(beacon_interval, min_msi);
    let mut used = beacon_reserve(phy);
    let mut grants = Vec::new();
    let mut rejected = Vec::new();
    for f in flows {
        let txop = txop_duration(f, si, phy);
        let slot = phy.poll_time() + txop;
        let grant = TxopGrant { station: f.station, txop };
        if used + slot <= si {
            used += slot;
            grants.push(grant);
        } else {
            rejected.push(grant);
        }
    }
    ScheduleTable {
        service_interval: si,
        grants,
        rejected,
    }
}

/// A flow waiting to be polled and the deadline of its next service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendingPoll {
    pub station: u32,
    pub deadline: Nanos,
}

/// Earliest deadline first; equal deadlines go to the lower station id.
pub fn edf_scheduler(pending: &[PendingPoll]) -> Option<u32> {
    pending.iter().min_by_key(|p| (p.deadline, p.station)).map(|p| p.station)
}

/// Deadline table kept by the EDF coordinator. A flow becomes eligible when
/// a burst is released (the coordinator knows arrivals from the TSPEC) and
/// its deadline is the release time plus its MSI. It stays eligible until a
/// service leaves it without backlog.
#[derive(Debug, Clone)]
pub struct EdfScheduler {
    flows: Vec<EdfFlow>,
}

#[derive(Debug, Clone, Copy)]
struct EdfFlow {
    poll: PendingPoll,
    msi: Nanos,
    eligible: bool,
}

impl EdfScheduler {
    pub fn new(flows: &[FlowSpec]) -> Self {
        Self {
            flows: flows
                .iter()
                .map(|f| EdfFlow {
                    poll: PendingPoll { station: f.station, deadline: f.msi },
                    msi: f.msi,
                    eligible: false,
                })
                .collect(),
        }
    }

    fn flow_mut(&mut self, station: u32) -> Option<&mut EdfFlow> {
        self.flows.iter_mut().find(|f| f.poll.station == station)
    }

    /// A burst of `station` arrived at `now`. An already eligible flow keeps
    /// its earlier deadline.
    pub fn release(&mut self, station: u32, now: Nanos) {
        if let Some(f) = self.flow_mut(station) {
            if !f.eligible {
                f.eligible = true;
                f.poll.deadline = now + f.msi;
            }
        }
    }

    /// Earliest-deadline eligible flow, if any.
    pub fn next_grant(&self) -> Option<u32> {
        self.flows
            .iter()
            .filter(|f| f.eligible)
            .map(|f| f.poll)
            .min_by_key(|p| (p.deadline, p.station))
            .map(|p| p.station)
    }

    /// Records a service of `station`; `next_release` is the arrival time of
    /// the oldest burst still queued there, if any.
    pub fn record_service(&mut self, station: u32, next_release: Option<Nanos>) {
        if let Some(f) = self.flow_mut(station) {
            match next_release {
                Some(t) => f.poll.deadline = t + f.msi,
                None => f.eligible = false,
            }
        }
    }

    pub fn deadline(&self, station: u32) -> Option<Nanos> {
        self.flows
            .iter()
            .find(|f| f.poll.station == station && f.eligible)
            .map(|f| f.poll.deadline)
    }
}
