//! Point coordination function.
//!
//! The superframe equals the smallest MSI of any registered station. Each
//! superframe opens with a beacon, after which the AP appends one polling
//! round (every station once, in registration order, whatever its class) to
//! its poll list. A polled station sends the burst at the head of its queue,
//! or a null frame. Polls that do not fit before the next beacon carry over
//! ahead of the next round; with an empty poll list the AP stays silent until
//! the next beacon.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::event::{EntityId, EventKind, Nanos, Simulation};

use super::common::{new_sim, populate, schedule_first_arrivals, serve_poll, PollLimit, Recorder};
use super::params::PhyParams;
use super::stats::LatencyStats;
use super::{AccessMethod, MacError, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PcfEvent {
    Arrival,
    ApWake,
}

impl EventKind for PcfEvent {
    fn tag(&self) -> &'static str {
        match self {
            PcfEvent::Arrival => "arrival",
            PcfEvent::ApWake => "ap_wake",
        }
    }
}

const AP: EntityId = EntityId::MAX;

/// Runs `scenario` under PCF.
pub fn run_pcf(scenario: &Scenario, phy: &PhyParams) -> Result<LatencyStats, MacError> {
    if scenario.access != AccessMethod::Pcf {
        return Err(MacError::WrongAccess {
            requested: scenario.access,
            runner: AccessMethod::Pcf,
        });
    }
    scenario.validate()?;
    phy.validate()?;
    let mut stations = populate(scenario, phy, scenario.seed);
    let superframe = stations.iter().map(|s| s.class.msi).min().unwrap_or(phy.beacon_interval);
    let mut rec = Recorder::default();
    let mut sim: Simulation<PcfEvent> = new_sim(scenario);
    schedule_first_arrivals(&mut sim, &stations, |_| PcfEvent::Arrival);
    sim.schedule(0, AP, PcfEvent::ApWake).expect("t=0");

    let mut next_tbtt: Nanos = 0;
    let mut polls: VecDeque<usize> = VecDeque::new();
    while let Some(ev) = sim.pop_until(scenario.duration) {
        let now = sim.now();
        match ev.kind {
            PcfEvent::Arrival => {
                let st = &mut stations[ev.target as usize];
                st.generate(now);
                rec.generated(st);
                sim.schedule_in(st.class.generation_period, ev.target, PcfEvent::Arrival);
            }
            PcfEvent::ApWake => {
                if now >= next_tbtt {
                    let end = now + phy.pifs + phy.beacon_time();
                    while next_tbtt <= now {
                        next_tbtt += superframe;
                    }
                    polls.extend(0..stations.len());
                    sim.schedule(end, AP, PcfEvent::ApWake).expect("future");
                } else if let Some(i) = polls.pop_front() {
                    let end = serve_poll(phy, &mut stations[i], &mut rec, now, PollLimit::HeadBurst);
                    sim.schedule(end, AP, PcfEvent::ApWake).expect("future");
                } else {
                    sim.schedule(next_tbtt, AP, PcfEvent::ApWake).expect("future");
                }
            }
        }
    }
    Ok(rec.finish(&stations, scenario.duration, Vec::new(), sim.take_trace()))
}
