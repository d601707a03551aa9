//! Deterministic discrete-event engine.
//!
//! Virtual time is integer nanoseconds. Events leave the queue in
//! `(time, seq)` order where `seq` is the insertion counter, so two runs that
//! schedule the same events in the same order produce the same trace.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt::Write as _;

/// Virtual time in nanoseconds.
pub type Nanos = u64;

pub const NS_PER_US: Nanos = 1_000;
pub const NS_PER_MS: Nanos = 1_000_000;
pub const NS_PER_S: Nanos = 1_000_000_000;

/// Identifies an entity (station, access point, anchor) addressed by an event.
pub type EntityId = u32;

/// Short label for an event payload, used in trace dumps.
pub trait EventKind {
    fn tag(&self) -> &'static str;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event<K> {
    pub time: Nanos,
    pub seq: u64,
    pub kind: K,
    pub target: EntityId,
}

/// Cancellation handle returned by [`Simulation::schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn seq(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ScheduleError {
    #[error("event at {at} ns is before the current time {now} ns")]
    InThePast { at: Nanos, now: Nanos },
    #[error("run_until({t_end} ns) is before the current time {now} ns")]
    EndInThePast { t_end: Nanos, now: Nanos },
}

#[derive(Debug)]
struct Entry<K> {
    time: Nanos,
    seq: u64,
    target: EntityId,
    kind: K,
}

impl<K> PartialEq for Entry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl<K> Eq for Entry<K> {}

impl<K> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Entry<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// One processed event as recorded in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub time: Nanos,
    pub seq: u64,
    pub kind: &'static str,
    pub target: EntityId,
}

impl TraceRecord {
    /// `time_ns<TAB>seq<TAB>kind<TAB>target`
    pub fn line(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}\t{}\t{}\t{}", self.time, self.seq, self.kind, self.target);
        s
    }
}

/// Event queue plus virtual clock.
#[derive(Debug)]
pub struct Simulation<K> {
    now: Nanos,
    next_seq: u64,
    heap: BinaryHeap<Reverse<Entry<K>>>,
    live: BTreeSet<u64>,
    trace: Option<Vec<TraceRecord>>,
}

impl<K> Default for Simulation<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K> Simulation<K> {
    pub fn new() -> Self {
        Self {
            now: 0,
            next_seq: 0,
            heap: BinaryHeap::new(),
            live: BTreeSet::new(),
            trace: None,
        }
    }

    /// Starts recording every processed event.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> &[TraceRecord] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn take_trace(&mut self) -> Vec<TraceRecord> {
        self.trace.as_mut().map(core::mem::take).unwrap_or_default()
    }

    pub fn now(&self) -> Nanos {
        self.now
    }

    /// Number of scheduled, not yet processed or cancelled events.
    pub fn pending(&self) -> usize {
        self.live.len()
    }

    pub fn schedule(&mut self, time: Nanos, target: EntityId, kind: K) -> Result<EventHandle, ScheduleError> {
        if time < self.now {
            return Err(ScheduleError::InThePast { at: time, now: self.now });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry { time, seq, target, kind }));
        self.live.insert(seq);
        Ok(EventHandle(seq))
    }

    /// Schedules `delay` ns after now; cannot fail.
    pub fn schedule_in(&mut self, delay: Nanos, target: EntityId, kind: K) -> EventHandle {
        let at = self.now + delay;
        self.schedule(at, target, kind).expect("relative schedule is never in the past")
    }

    /// Returns `true` if the event was still pending.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        self.live.remove(&handle.0)
    }

    pub fn is_pending(&self, handle: EventHandle) -> bool {
        self.live.contains(&handle.0)
    }

    /// Time of the earliest live event.
    pub fn peek_time(&mut self) -> Option<Nanos> {
        self.drop_cancelled_head();
        self.heap.peek().map(|Reverse(e)| e.time)
    }

    fn drop_cancelled_head(&mut self) {
        while let Some(Reverse(head)) = self.heap.peek() {
            if self.live.contains(&head.seq) {
                break;
            }
            self.heap.pop();
        }
    }

    /// Removes the next live event with `time <= t_end` and advances the clock to it.
    pub fn pop_until(&mut self, t_end: Nanos) -> Option<Event<K>>
    where
        K: EventKind,
    {
        self.drop_cancelled_head();
        match self.heap.peek() {
            Some(Reverse(head)) if head.time <= t_end => {}
            _ => return None,
        }
        let Reverse(e) = self.heap.pop()?;
        self.live.remove(&e.seq);
        debug_assert!(e.time >= self.now);
        self.now = e.time;
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceRecord {
                time: e.time,
                seq: e.seq,
                kind: e.kind.tag(),
                target: e.target,
            });
        }
        Some(Event {
            time: e.time,
            seq: e.seq,
            kind: e.kind,
            target: e.target,
        })
    }

    /// Processes every event with `time <= t_end` through `handler`, then sets
    /// the clock to `t_end`. Returns the number of events processed.
    pub fn run_until<F>(&mut self, t_end: Nanos, mut handler: F) -> Result<usize, ScheduleError>
    where
        K: EventKind,
        F: FnMut(&mut Self, Event<K>),
    {
        if t_end < self.now {
            return Err(ScheduleError::EndInThePast { t_end, now: self.now });
        }
        let mut count = 0;
        while let Some(ev) = self.pop_until(t_end) {
            handler(self, ev);
            count += 1;
        }
        self.now = t_end;
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    struct Tick(u32);

    impl EventKind for Tick {
        fn tag(&self) -> &'static str {
            "tick"
        }
    }

    #[test]
    fn schedule_at_now_fires_next() {
        let mut sim = Simulation::new();
        sim.schedule(0, 0, Tick(1)).unwrap();
        let ev = sim.pop_until(0).unwrap();
        assert_eq!(ev.kind, Tick(1));
        assert_eq!(sim.now(), 0);
    }

    #[test]
    fn ties_break_by_insertion_order() {
        let mut sim = Simulation::new();
        sim.schedule(5, 9, Tick(1)).unwrap();
        sim.schedule(5, 1, Tick(2)).unwrap();
        sim.schedule(5, 5, Tick(3)).unwrap();
        let mut got = vec![];
        sim.run_until(10, |_, e| got.push(e.kind.0)).unwrap();
        assert_eq!(got, vec![1, 2, 3]);
    }

    #[test]
    fn past_schedule_rejected() {
        let mut sim: Simulation<Tick> = Simulation::new();
        sim.run_until(100, |_, _| {}).unwrap();
        let err = sim.schedule(99, 0, Tick(0)).unwrap_err();
        assert_eq!(err, ScheduleError::InThePast { at: 99, now: 100 });
    }

    #[test]
    fn empty_run_advances_clock() {
        let mut sim: Simulation<Tick> = Simulation::new();
        let n = sim.run_until(NS_PER_S, |_, _| {}).unwrap();
        assert_eq!(n, 0);
        assert_eq!(sim.now(), NS_PER_S);
    }

    #[test]
    fn run_until_is_inclusive_and_partial() {
        let mut sim = Simulation::new();
        for ms in 1..=3 {
            sim.schedule(ms * NS_PER_MS, 0, Tick(ms as u32)).unwrap();
        }
        let n = sim.run_until(2 * NS_PER_MS, |_, _| {}).unwrap();
        assert_eq!(n, 2);
        assert_eq!(sim.now(), 2 * NS_PER_MS);
        assert_eq!(sim.pending(), 1);
    }

    #[test]
    fn end_before_now_rejected() {
        let mut sim: Simulation<Tick> = Simulation::new();
        sim.run_until(10, |_, _| {}).unwrap();
        assert!(sim.run_until(5, |_, _| {}).is_err());
    }

    #[test]
    fn cancelled_event_never_fires() {
        let mut sim = Simulation::new();
        let h = sim.schedule(1, 0, Tick(1)).unwrap();
        sim.schedule(2, 0, Tick(2)).unwrap();
        assert!(sim.cancel(h));
        assert!(!sim.cancel(h));
        let mut got = vec![];
        sim.run_until(10, |_, e| got.push(e.kind.0)).unwrap();
        assert_eq!(got, vec![2]);
    }

    #[test]
    fn handler_can_schedule_follow_ups() {
        let mut sim = Simulation::new();
        sim.schedule(0, 0, Tick(0)).unwrap();
        let n = sim
            .run_until(100, |s, e| {
                if e.kind.0 < 9 {
                    s.schedule_in(10, 0, Tick(e.kind.0 + 1));
                }
            })
            .unwrap();
        assert_eq!(n, 10);
    }

    #[test]
    fn trace_lines_are_tab_separated() {
        let mut sim = Simulation::new();
        sim.enable_trace();
        sim.schedule(7, 3, Tick(0)).unwrap();
        sim.run_until(7, |_, _| {}).unwrap();
        assert_eq!(sim.trace()[0].line(), "7\t0\ttick\t3");
    }
}
