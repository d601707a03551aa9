//! HCF controlled channel access.
//!
//! The hybrid coordinator owns the medium and grants TXOPs by polling.
//!
//! With the reference scheduler the polling table is fixed: every service
//! interval starts on the SI grid, the admitted flows are polled in table
//! order, and the medium then stays idle until the next SI. Flows that failed
//! admission are never polled. Periodic flows whose generation period
//! divides the SI align their generation with the SI grid (the service start
//! time negotiated in the TSPEC).
//!
//! With EDF the coordinator always polls the flow with the earliest deadline
//! and grants it one maximum burst.

use alloc::vec::Vec;

use crate::event::{EntityId, EventKind, Nanos, Simulation};

use super::common::{new_sim, populate, schedule_first_arrivals, serve_poll, PollLimit, Recorder, Station};
use super::params::PhyParams;
use super::sched::{beacon_reserve, reference_scheduler, EdfScheduler, FlowSpec};
use super::stats::LatencyStats;
use super::{AccessMethod, MacError, Scenario, SchedulerKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HccaEvent {
    Arrival,
    SiStart,
    ApWake,
}

impl EventKind for HccaEvent {
    fn tag(&self) -> &'static str {
        match self {
            HccaEvent::Arrival => "arrival",
            HccaEvent::SiStart => "si_start",
            HccaEvent::ApWake => "ap_wake",
        }
    }
}

const AP: EntityId = EntityId::MAX;

fn on_arrival(sim: &mut Simulation<HccaEvent>, stations: &mut [Station], rec: &mut Recorder, id: EntityId) {
    let now = sim.now();
    let st = &mut stations[id as usize];
    st.generate(now);
    rec.generated(st);
    sim.schedule_in(st.class.generation_period, id, HccaEvent::Arrival);
}

/// Runs `scenario` under HCCA with the given scheduler.
pub fn run_hcca(scenario: &Scenario, phy: &PhyParams, scheduler: SchedulerKind) -> Result<LatencyStats, MacError> {
    if scenario.access != AccessMethod::Hcca {
        return Err(MacError::WrongAccess {
            requested: scenario.access,
            runner: AccessMethod::Hcca,
        });
    }
    scenario.validate()?;
    phy.validate()?;
    let stations = populate(scenario, phy, scenario.seed);
    let flows: Vec<FlowSpec> = stations.iter().map(|s| FlowSpec::from_class(s.id, &s.class, phy)).collect();
    match scheduler {
        SchedulerKind::Reference => Ok(run_reference(scenario, phy, stations, &flows)),
        SchedulerKind::Edf => Ok(run_edf(scenario, phy, stations, &flows)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Admitted(usize),
    Idle,
}

fn run_reference(scenario: &Scenario, phy: &PhyParams, mut stations: Vec<Station>, flows: &[FlowSpec]) -> LatencyStats {
    let table = reference_scheduler(flows, phy, phy.beacon_interval);
    let si = table.service_interval;
    for st in stations.iter_mut() {
        let period = st.class.generation_period;
        if period <= si && si % period == 0 {
            st.phase = 0;
        }
    }
    let mut rec = Recorder::default();
    let mut sim: Simulation<HccaEvent> = new_sim(scenario);
    schedule_first_arrivals(&mut sim, &stations, |_| HccaEvent::Arrival);
    sim.schedule(0, AP, HccaEvent::SiStart).expect("t=0");

    let mut stage = Stage::Idle;
    while let Some(ev) = sim.pop_until(scenario.duration) {
        let now = sim.now();
        match ev.kind {
            HccaEvent::Arrival => on_arrival(&mut sim, &mut stations, &mut rec, ev.target),
            HccaEvent::SiStart => {
                debug_assert_eq!(stage, Stage::Idle);
                sim.schedule(now + si, AP, HccaEvent::SiStart).expect("future");
                let start = if now % phy.beacon_interval == 0 {
                    now + beacon_reserve(phy)
                } else {
                    now + phy.pifs
                };
                stage = Stage::Admitted(0);
                sim.schedule(start, AP, HccaEvent::ApWake).expect("future");
            }
            HccaEvent::ApWake => match stage {
                Stage::Admitted(i) if i < table.grants.len() => {
                    let g = table.grants[i];
                    let st = &mut stations[g.station as usize];
                    let end = serve_poll(phy, st, &mut rec, now, PollLimit::Txop(g.txop));
                    stage = Stage::Admitted(i + 1);
                    sim.schedule(end, AP, HccaEvent::ApWake).expect("future");
                }
                Stage::Admitted(_) | Stage::Idle => stage = Stage::Idle,
            },
        }
    }
    let rejected = table.rejected.iter().map(|g| g.station).collect();
    rec.finish(&stations, scenario.duration, rejected, sim.take_trace())
}

fn run_edf(scenario: &Scenario, phy: &PhyParams, mut stations: Vec<Station>, flows: &[FlowSpec]) -> LatencyStats {
    let mut edf = EdfScheduler::new(flows);
    let burst_txop: Vec<Nanos> = stations
        .iter()
        .map(|s| s.fragments.iter().map(|&b| phy.acked_exchange(b)).sum())
        .collect();
    let mut rec = Recorder::default();
    let mut sim: Simulation<HccaEvent> = new_sim(scenario);
    schedule_first_arrivals(&mut sim, &stations, |_| HccaEvent::Arrival);
    let mut wake = Some(sim.schedule(0, AP, HccaEvent::ApWake).expect("t=0"));
    let mut busy = true;
    let mut next_tbtt: Nanos = 0;
    while let Some(ev) = sim.pop_until(scenario.duration) {
        let now = sim.now();
        match ev.kind {
            HccaEvent::Arrival => {
                on_arrival(&mut sim, &mut stations, &mut rec, ev.target);
                edf.release(ev.target, now);
                if !busy {
                    if let Some(h) = wake.take() {
                        sim.cancel(h);
                    }
                    busy = true;
                    wake = Some(sim.schedule(now, AP, HccaEvent::ApWake).expect("now"));
                }
            }
            HccaEvent::SiStart => {}
            HccaEvent::ApWake => {
                let end = if now >= next_tbtt {
                    while next_tbtt <= now {
                        next_tbtt += phy.beacon_interval;
                    }
                    Some(now + beacon_reserve(phy))
                } else if let Some(id) = edf.next_grant() {
                    let st = &mut stations[id as usize];
                    let end = serve_poll(phy, st, &mut rec, now, PollLimit::Txop(burst_txop[id as usize]));
                    edf.record_service(id, st.queue.front().map(|p| p.gen));
                    Some(end)
                } else {
                    None
                };
                busy = end.is_some();
                let at = end.unwrap_or(next_tbtt);
                wake = Some(sim.schedule(at, AP, HccaEvent::ApWake).expect("future"));
            }
        }
    }
    rec.finish(&stations, scenario.duration, Vec::new(), sim.take_trace())
}
