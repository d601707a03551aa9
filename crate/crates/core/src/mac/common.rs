//! Station population and bookkeeping shared by the access-method runners.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::event::{EntityId, EventKind, Nanos, Simulation, TraceRecord};
use crate::rng::SimRng;

use super::params::PhyParams;
use super::stats::{Accumulator, LatencyStats};
use super::traffic::{ClassKind, TrafficClass};
use super::{PhaseModel, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Packet {
    pub gen: Nanos,
    pub bytes: u32,
    pub burst: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct Station {
    pub id: u32,
    pub class: TrafficClass,
    pub fragments: Vec<u32>,
    pub phase: Nanos,
    pub queue: VecDeque<Packet>,
    next_burst: u64,
}

impl Station {
    /// Generates one burst at `now`; returns whether the queue was empty before.
    pub fn generate(&mut self, now: Nanos) -> bool {
        let was_empty = self.queue.is_empty();
        let burst = self.next_burst;
        self.next_burst += 1;
        for &bytes in &self.fragments {
            self.queue.push_back(Packet { gen: now, bytes, burst });
        }
        was_empty
    }

    pub fn head_burst_len(&self) -> usize {
        match self.queue.front() {
            None => 0,
            Some(h) => self.queue.iter().take_while(|p| p.burst == h.burst).count(),
        }
    }
}

/// Builds the station list: safety stations first, then AR stations. Phases
/// are drawn uniformly over each station's generation period.
pub(crate) fn populate(scenario: &Scenario, phy: &PhyParams, seed: u64) -> Vec<Station> {
    let mut out = Vec::new();
    let classes = core::iter::repeat_n(scenario.safety, scenario.n_safety as usize)
        .chain(core::iter::repeat_n(scenario.ar, scenario.n_ar as usize));
    for (id, class) in classes.enumerate() {
        let phase = match scenario.phases {
            PhaseModel::Synchronous => 0,
            PhaseModel::Random => SimRng::stream(seed, 0x1000 + id as u64).range_inclusive(0, class.generation_period - 1),
        };
        out.push(Station {
            id: id as u32,
            class,
            fragments: class.fragments(phy.max_msdu_bytes),
            phase,
            queue: VecDeque::new(),
            next_burst: 0,
        });
    }
    out
}

/// Per-class delay accounting.
#[derive(Debug, Default)]
pub(crate) struct Recorder {
    safety: Accumulator,
    ar: Accumulator,
    pub collisions: u64,
}

impl Recorder {
    fn acc(&mut self, kind: ClassKind) -> &mut Accumulator {
        match kind {
            ClassKind::Safety => &mut self.safety,
            ClassKind::Ar => &mut self.ar,
        }
    }

    pub fn generated(&mut self, st: &Station) {
        let n = st.fragments.len() as u64;
        self.acc(st.class.kind).generated(n);
    }

    pub fn delivered(&mut self, st: &Station, p: &Packet, data_end: Nanos, ack_end: Nanos) {
        let msi = st.class.msi;
        self.acc(st.class.kind).delivered(ack_end - p.gen, data_end - p.gen, msi);
    }

    pub fn dropped(&mut self, st: &Station) {
        self.acc(st.class.kind).dropped();
    }

    pub fn finish(&self, stations: &[Station], now: Nanos, rejected: Vec<u32>, trace: Vec<TraceRecord>) -> LatencyStats {
        let ages = |kind: ClassKind| -> Vec<Nanos> {
            stations
                .iter()
                .filter(|s| s.class.kind == kind)
                .flat_map(|s| s.queue.iter().map(|p| now - p.gen))
                .collect()
        };
        let msi = |kind: ClassKind| {
            stations
                .iter()
                .find(|s| s.class.kind == kind)
                .map(|s| s.class.msi)
                .unwrap_or(Nanos::MAX)
        };
        LatencyStats {
            safety: self.safety.finish(&ages(ClassKind::Safety), msi(ClassKind::Safety)),
            ar: self.ar.finish(&ages(ClassKind::Ar), msi(ClassKind::Ar)),
            collisions: self.collisions,
            rejected_stations: rejected,
            trace,
        }
    }
}

/// Empty simulation, tracing if the scenario asks for it.
pub(crate) fn new_sim<K>(scenario: &Scenario) -> Simulation<K> {
    let mut sim = Simulation::new();
    if scenario.trace {
        sim.enable_trace();
    }
    sim
}

/// Schedules the first arrival of every station.
pub(crate) fn schedule_first_arrivals<K: EventKind>(
    sim: &mut Simulation<K>,
    stations: &[Station],
    arrival: impl Fn(EntityId) -> K,
) {
    for s in stations {
        sim.schedule(s.phase, s.id, arrival(s.id)).expect("phase is in the future");
    }
}

/// How much a polled station may send.
#[derive(Debug, Clone, Copy)]
pub(crate) enum PollLimit {
    /// The MSDUs of the burst at the head of the queue (PCF).
    HeadBurst,
    /// Frames whose acked exchanges fit in this TXOP (HCCA).
    Txop(Nanos),
}

/// Polls station `st` at `start` and delivers what it may send. Returns the
/// time the medium is free again.
pub(crate) fn serve_poll(phy: &PhyParams, st: &mut Station, rec: &mut Recorder, start: Nanos, limit: PollLimit) -> Nanos {
    let mut t = start + phy.poll_time();
    let mut budget = match limit {
        PollLimit::HeadBurst => Nanos::MAX,
        PollLimit::Txop(txop) => txop,
    };
    let mut frames = match limit {
        PollLimit::HeadBurst => st.head_burst_len(),
        PollLimit::Txop(_) => usize::MAX,
    };
    let mut sent = 0usize;
    while frames > 0 {
        let Some(&p) = st.queue.front() else { break };
        let ex = phy.acked_exchange(p.bytes);
        if ex > budget {
            break;
        }
        st.queue.pop_front();
        let data_end = t + phy.tx_time(p.bytes);
        let ack_end = data_end + phy.sifs + phy.ack_duration;
        rec.delivered(st, &p, data_end, ack_end);
        t += ex;
        budget -= ex;
        frames -= 1;
        sent += 1;
    }
    if sent == 0 {
        t += phy.control_time() + phy.sifs;
    }
    t
}
