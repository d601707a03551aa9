use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::solver::{trilaterate, PositionEstimate};
use super::twr::{simulate_exchange, tof_from_twr, RangingExchange, RangingNoise, SPEED_OF_LIGHT};
use super::{Anchor, LocError, Vec3};
use crate::event::{EntityId, EventKind, Nanos, Simulation, TraceRecord, NS_PER_US};
use crate::math::round;
use crate::rng::{splitmix64, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LocEvent {
    Start,
    Done,
    Timeout,
}

impl EventKind for LocEvent {
    fn tag(&self) -> &'static str {
        match self {
            LocEvent::Start => "twr_start",
            LocEvent::Done => "twr_done",
            LocEvent::Timeout => "twr_timeout",
        }
    }
}

/// Result of one localization round.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationFix {
    pub ms_id: u32,
    pub round_start: Nanos,
    /// Virtual time at which the server computed the fix.
    pub timestamp: Nanos,
    pub exchanges: Vec<RangingExchange>,
    pub estimate: PositionEstimate,
}

impl LocationFix {
    pub fn round_duration(&self) -> Nanos {
        self.timestamp - self.round_start
    }
}

/// Localization server: commands one TWR exchange per anchor, strictly one
/// after another on the shared medium, then trilaterates.
#[derive(Debug)]
pub struct LocalizationServer {
    anchors: Vec<Anchor>,
    pub noise: RangingNoise,
    /// Responder turnaround, ns.
    pub processing_delay: Nanos,
    /// Airtime of each ranging frame, ns.
    pub frame_airtime: Nanos,
    /// How long the server waits for a silent anchor, ns.
    pub timeout: Nanos,
    /// Anchors that never answer.
    pub unreachable: Vec<u32>,
    sim: Simulation<LocEvent>,
    fixes: BTreeMap<(u32, Nanos), PositionEstimate>,
}

impl LocalizationServer {
    pub fn new(anchors: Vec<Anchor>, noise: RangingNoise) -> Result<Self, LocError> {
        noise.validate()?;
        for (i, a) in anchors.iter().enumerate() {
            if anchors[..i].iter().any(|b| b.id == a.id) {
                return Err(LocError::DuplicateAnchor(a.id));
            }
        }
        let mut sim = Simulation::new();
        sim.enable_trace();
        Ok(Self {
            anchors,
            noise,
            processing_delay: 100 * NS_PER_US,
            frame_airtime: 20 * NS_PER_US,
            timeout: 1_000 * NS_PER_US,
            unreachable: Vec::new(),
            sim,
            fixes: BTreeMap::new(),
        })
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn now(&self) -> Nanos {
        self.sim.now()
    }

    /// Processed engine events so far.
    pub fn trace(&self) -> &[TraceRecord] {
        self.sim.trace()
    }

    /// Stored fixes keyed by `(ms_id, timestamp)`.
    pub fn fixes(&self) -> &BTreeMap<(u32, Nanos), PositionEstimate> {
        &self.fixes
    }

    fn exchange_duration(&self, ms: Vec3, anchor: &Anchor) -> Nanos {
        let flight = round(ms.distance(anchor.position) / SPEED_OF_LIGHT * 1e9) as Nanos;
        2 * (self.frame_airtime + flight) + self.processing_delay
    }

    /// Runs one round for mobile `ms_id` at true position `ms`. Exchange
    /// noise comes from `seed`.
    pub fn locate(&mut self, ms_id: u32, ms: Vec3, seed: u64) -> Result<LocationFix, LocError> {
        let round_start = self.sim.now();
        let mut exchanges = Vec::new();
        if !self.anchors.is_empty() {
            self.sim.schedule(round_start, 0, LocEvent::Start).expect("now");
        }
        while let Some(ev) = self.sim.pop_until(Nanos::MAX) {
            let idx = ev.target as usize;
            let anchor = self.anchors[idx];
            match ev.kind {
                LocEvent::Start => {
                    if self.unreachable.contains(&anchor.id) {
                        self.sim.schedule_in(self.timeout, ev.target, LocEvent::Timeout);
                    } else {
                        let d = self.exchange_duration(ms, &anchor);
                        self.sim.schedule_in(d, ev.target, LocEvent::Done);
                    }
                }
                LocEvent::Done | LocEvent::Timeout => {
                    if ev.kind == LocEvent::Done {
                        let delay_s = self.processing_delay as f64 * 1e-9;
                        exchanges.push(simulate_exchange(ms, &anchor, self.noise, delay_s, seed));
                    }
                    if idx + 1 < self.anchors.len() {
                        self.sim.schedule_in(0, (idx + 1) as EntityId, LocEvent::Start);
                    }
                }
            }
        }
        // Exchanges with t_round < t_reply are unusable, not clamped.
        let m: Vec<(Vec3, f64)> = exchanges
            .iter()
            .filter_map(|x| {
                let a = self.anchors.iter().find(|a| a.id == x.anchor_id)?;
                tof_from_twr(x).ok().map(|d| (a.position, d))
            })
            .collect();
        if m.len() < 4 {
            return Err(LocError::InsufficientRanging { successful: m.len() });
        }
        let estimate = trilaterate(&m, None)?;
        let timestamp = self.sim.now();
        self.fixes.insert((ms_id, timestamp), estimate);
        Ok(LocationFix {
            ms_id,
            round_start,
            timestamp,
            exchanges,
            estimate,
        })
    }
}

/// One Monte-Carlo draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub index: u32,
    pub truth: Vec3,
    pub outcome: Result<PositionEstimate, LocError>,
}

impl Trial {
    /// 3-D error of a successful fix.
    pub fn error(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|e| self.truth.distance(e.position))
    }
}

/// `n` positions drawn uniformly in the box `[lo, hi]` from stream 0 of `seed`.
pub fn random_positions(n: u32, seed: u64, lo: Vec3, hi: Vec3) -> Vec<Vec3> {
    let mut pos = SimRng::stream(seed, 0);
    (0..n)
        .map(|_| {
            Vec3::new(
                lo.x + (hi.x - lo.x) * pos.uniform(),
                lo.y + (hi.y - lo.y) * pos.uniform(),
                lo.z + (hi.z - lo.z) * pos.uniform(),
            )
        })
        .collect()
}

/// Locates one mobile per entry of `positions` in turn on `server`. Trial
/// `i` ranges with seed `splitmix64(seed ^ (i + 1))`. A round that fails
/// (too few usable exchanges) is kept as a failed trial; a degenerate
/// anchor set aborts the run.
pub fn run_trials(server: &mut LocalizationServer, positions: &[Vec3], seed: u64) -> Result<Vec<Trial>, LocError> {
    let mut out = Vec::with_capacity(positions.len());
    for (i, &truth) in positions.iter().enumerate() {
        let i = i as u32;
        let outcome = server.locate(i, truth, splitmix64(seed ^ (i as u64 + 1))).map(|f| f.estimate);
        if let Err(e @ LocError::DegenerateGeometry { .. }) = outcome {
            return Err(e);
        }
        out.push(Trial { index: i, truth, outcome });
    }
    Ok(out)
}

/// [`run_trials`] over `trials` random positions in `[lo, hi]` with default
/// server timing.
pub fn monte_carlo(anchors: &[Anchor], noise: RangingNoise, trials: u32, seed: u64, lo: Vec3, hi: Vec3) -> Result<Vec<Trial>, LocError> {
    let mut server = LocalizationServer::new(anchors.to_vec(), noise)?;
    run_trials(&mut server, &random_positions(trials, seed, lo, hi), seed)
}

/// Root mean square of the 3-D errors over successful fixes.
pub fn rmse(trials: &[Trial]) -> f64 {
    let (sum, n) = trials
        .iter()
        .filter_map(Trial::error)
        .fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
    if n == 0 {
        0.0
    } else {
        crate::math::sqrt(sum / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room() -> Vec<Anchor> {
        alloc::vec![
            Anchor::new(1, 0.0, 0.0, 0.0),
            Anchor::new(2, 10.0, 0.0, 0.0),
            Anchor::new(3, 0.0, 10.0, 0.0),
            Anchor::new(4, 0.0, 0.0, 3.0),
        ]
    }

    #[test]
    fn noiseless_round_recovers_position() {
        let mut s = LocalizationServer::new(room(), RangingNoise::default()).unwrap();
        let p = Vec3::new(3.0, 4.0, 1.0);
        let fix = s.locate(7, p, 1).unwrap();
        assert!(fix.estimate.position.distance(p) < 1e-6);
        assert!(s.fixes().contains_key(&(7, fix.timestamp)));
    }

    #[test]
    fn lost_anchor_means_insufficient_ranging() {
        let mut s = LocalizationServer::new(room(), RangingNoise::default()).unwrap();
        s.unreachable.push(3);
        assert_eq!(
            s.locate(1, Vec3::new(1.0, 1.0, 1.0), 1),
            Err(LocError::InsufficientRanging { successful: 3 })
        );
    }

    #[test]
    fn exchanges_are_serialized() {
        let mut s = LocalizationServer::new(room(), RangingNoise::default()).unwrap();
        let p = Vec3::new(2.0, 8.0, 2.0);
        let fix = s.locate(1, p, 1).unwrap();
        let expected: Nanos = s.anchors().iter().map(|a| s.exchange_duration(p, a)).sum();
        assert_eq!(fix.round_duration(), expected);
        let t = s.trace();
        for pair in t.chunks(2) {
            assert_eq!(pair[0].kind, "twr_start");
            assert_eq!(pair[1].kind, "twr_done");
        }
        for w in t.windows(2) {
            assert!(w[0].time <= w[1].time);
        }
        // The next round starts where the previous one ended.
        let second = s.locate(2, p, 2).unwrap();
        assert_eq!(second.round_start, fix.timestamp);
    }

    #[test]
    fn duplicate_anchor_ids_rejected() {
        let mut a = room();
        a[1].id = 1;
        assert_eq!(
            LocalizationServer::new(a, RangingNoise::default()).unwrap_err(),
            LocError::DuplicateAnchor(1)
        );
    }
}
