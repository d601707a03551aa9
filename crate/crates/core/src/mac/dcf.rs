//! Distributed coordination function: CSMA/CA with binary exponential backoff.
//!
//! Backoff countdown is event driven. While the medium is idle every
//! backlogged station counts down from `idle_since + DIFS`; only the earliest
//! expiry is scheduled. A transmission freezes the other counters at the
//! number of whole slots they completed. Stations whose counters expire at
//! the same instant collide.

use alloc::vec::Vec;

use crate::event::{EntityId, EventHandle, EventKind, Nanos, Simulation};
use crate::rng::SimRng;

use super::common::{new_sim, populate, schedule_first_arrivals, Recorder, Station};
use super::params::PhyParams;
use super::stats::LatencyStats;
use super::{AccessMethod, MacError, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DcfEvent {
    Arrival,
    Access,
    ExchangeEnd,
}

impl EventKind for DcfEvent {
    fn tag(&self) -> &'static str {
        match self {
            DcfEvent::Arrival => "arrival",
            DcfEvent::Access => "access",
            DcfEvent::ExchangeEnd => "exchange_end",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Backoff {
    counter: u32,
    count_start: Option<Nanos>,
    cw: u32,
    retries: u32,
}

struct Dcf<'a> {
    phy: &'a PhyParams,
    sim: Simulation<DcfEvent>,
    stations: Vec<Station>,
    backoff: Vec<Backoff>,
    rng: SimRng,
    rec: Recorder,
    idle_since: Option<Nanos>,
    access: Option<EventHandle>,
}

const AP: EntityId = EntityId::MAX;

impl Dcf<'_> {
    fn draw(&mut self, cw: u32) -> u32 {
        self.rng.range_inclusive(0, cw as u64) as u32
    }

    fn expiry(&self, i: usize) -> Option<Nanos> {
        let b = &self.backoff[i];
        if self.stations[i].queue.is_empty() {
            return None;
        }
        b.count_start.map(|cs| cs + b.counter as Nanos * self.phy.slot)
    }

    fn reschedule_access(&mut self) {
        if let Some(h) = self.access.take() {
            self.sim.cancel(h);
        }
        if self.idle_since.is_none() {
            return;
        }
        let next = (0..self.stations.len()).filter_map(|i| self.expiry(i)).min();
        if let Some(t) = next {
            self.access = Some(self.sim.schedule(t, AP, DcfEvent::Access).expect("expiry is not in the past"));
        }
    }

    fn on_arrival(&mut self, i: usize) {
        let now = self.sim.now();
        let st = &mut self.stations[i];
        let was_empty = st.generate(now);
        self.rec.generated(&self.stations[i]);
        let period = self.stations[i].class.generation_period;
        self.sim.schedule_in(period, i as EntityId, DcfEvent::Arrival);
        if was_empty {
            let cw = self.backoff[i].cw;
            self.backoff[i].counter = self.draw(cw);
            self.backoff[i].count_start = self.idle_since.map(|idle| idle.max(now) + self.phy.difs);
            self.reschedule_access();
        }
    }

    fn on_access(&mut self) {
        let now = self.sim.now();
        self.access = None;
        let mut tx: Vec<usize> = Vec::new();
        for i in 0..self.stations.len() {
            if self.expiry(i) == Some(now) {
                tx.push(i);
            }
        }
        debug_assert!(!tx.is_empty());
        self.idle_since = None;
        for (i, b) in self.backoff.iter_mut().enumerate() {
            if tx.contains(&i) {
                continue;
            }
            if let Some(cs) = b.count_start.take() {
                if cs <= now && !self.stations[i].queue.is_empty() {
                    let done = ((now - cs) / self.phy.slot) as u32;
                    b.counter = b.counter.saturating_sub(done);
                }
            }
        }

        let end = if let [i] = tx[..] {
            let p = self.stations[i].queue.pop_front().expect("contender has a packet");
            let data_end = now + self.phy.tx_time(p.bytes);
            let ack_end = data_end + self.phy.sifs + self.phy.ack_duration;
            self.rec.delivered(&self.stations[i], &p, data_end, ack_end);
            let b = &mut self.backoff[i];
            b.cw = self.phy.cw_min;
            b.retries = 0;
            b.count_start = None;
            if !self.stations[i].queue.is_empty() {
                let cw = self.phy.cw_min;
                self.backoff[i].counter = self.draw(cw);
            }
            ack_end
        } else {
            self.rec.collisions += 1;
            let longest = tx
                .iter()
                .map(|&i| self.phy.tx_time(self.stations[i].queue[0].bytes))
                .max()
                .unwrap_or(0);
            for &i in &tx {
                let b = &mut self.backoff[i];
                b.retries += 1;
                b.count_start = None;
                if b.retries > self.phy.retry_limit {
                    b.retries = 0;
                    b.cw = self.phy.cw_min;
                    self.stations[i].queue.pop_front();
                    self.rec.dropped(&self.stations[i]);
                } else {
                    b.cw = (2 * b.cw + 1).min(self.phy.cw_max);
                }
                if !self.stations[i].queue.is_empty() {
                    let cw = self.backoff[i].cw;
                    self.backoff[i].counter = self.draw(cw);
                }
            }
            now + longest + self.phy.sifs + self.phy.ack_duration
        };
        self.sim.schedule(end, AP, DcfEvent::ExchangeEnd).expect("exchange ends in the future");
    }

    fn on_exchange_end(&mut self) {
        let now = self.sim.now();
        self.idle_since = Some(now);
        let start = now + self.phy.difs;
        for (i, b) in self.backoff.iter_mut().enumerate() {
            if !self.stations[i].queue.is_empty() {
                b.count_start = Some(start);
            }
        }
        self.reschedule_access();
    }
}

/// Runs `scenario` under DCF.
pub fn run_dcf(scenario: &Scenario, phy: &PhyParams) -> Result<LatencyStats, MacError> {
    if scenario.access != AccessMethod::Dcf {
        return Err(MacError::WrongAccess {
            requested: scenario.access,
            runner: AccessMethod::Dcf,
        });
    }
    scenario.validate()?;
    phy.validate()?;
    let stations = populate(scenario, phy, scenario.seed);
    let backoff = stations
        .iter()
        .map(|_| Backoff {
            counter: 0,
            count_start: None,
            cw: phy.cw_min,
            retries: 0,
        })
        .collect();
    let mut dcf = Dcf {
        phy,
        sim: new_sim(scenario),
        stations,
        backoff,
        rng: SimRng::stream(scenario.seed, 0xdcf),
        rec: Recorder::default(),
        idle_since: Some(0),
        access: None,
    };
    schedule_first_arrivals(&mut dcf.sim, &dcf.stations, |_| DcfEvent::Arrival);
    while let Some(ev) = dcf.sim.pop_until(scenario.duration) {
        match ev.kind {
            DcfEvent::Arrival => dcf.on_arrival(ev.target as usize),
            DcfEvent::Access => dcf.on_access(),
            DcfEvent::ExchangeEnd => dcf.on_exchange_end(),
        }
    }
    let trace = dcf.sim.take_trace();
    Ok(dcf.rec.finish(&dcf.stations, scenario.duration, Vec::new(), trace))
}
