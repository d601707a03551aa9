//! IEEE 802.11 channel-access simulator.
//!
//! Three access methods share one traffic model: DCF (CSMA/CA with binary
//! exponential backoff), PCF (class-blind round-robin polling in a
//! contention-free period) and HCCA (TXOP grants from either the reference
//! scheduler or an earliest-deadline-first scheduler). Each run is a single
//! [`crate::event::Simulation`] and returns per-class [`LatencyStats`].

mod common;
pub mod dcf;
pub mod hcca;
pub mod params;
pub mod pcf;
pub mod sched;
pub mod stats;
pub mod sweep;
pub mod traffic;

pub use dcf::run_dcf;
pub use hcca::run_hcca;
pub use params::PhyParams;
pub use pcf::run_pcf;
pub use sched::{edf_scheduler, reference_scheduler, EdfScheduler, FlowSpec, ScheduleTable, TxopGrant};
pub use stats::{ClassStats, LatencyStats};
pub use sweep::{sweep, SweepRow};
pub use traffic::{ClassKind, TrafficClass};

use crate::event::{Nanos, NS_PER_S};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessMethod {
    Dcf,
    Pcf,
    Hcca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    Reference,
    Edf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MacError {
    #[error("scenario requests {requested:?} but the runner implements {runner:?}")]
    WrongAccess { requested: AccessMethod, runner: AccessMethod },
    #[error("invalid PHY parameters: {0}")]
    Phy(&'static str),
    #[error("invalid traffic class: {0}")]
    Traffic(&'static str),
}

/// One simulated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub n_safety: u32,
    pub n_ar: u32,
    pub access: AccessMethod,
    pub scheduler: SchedulerKind,
    pub duration: Nanos,
    pub seed: u64,
    pub safety: TrafficClass,
    pub ar: TrafficClass,
    pub phases: PhaseModel,
    /// Record every processed event in [`LatencyStats::trace`].
    pub trace: bool,
}

/// Offset of each station's first generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseModel {
    /// Every station generates its first burst at t = 0.
    #[default]
    Synchronous,
    /// Uniform offset within one generation period, from the scenario seed.
    Random,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_safety: 2,
            n_ar: 5,
            access: AccessMethod::Hcca,
            scheduler: SchedulerKind::Reference,
            duration: 30 * NS_PER_S,
            seed: 1,
            safety: TrafficClass::safety(),
            ar: TrafficClass::ar(),
            phases: PhaseModel::Synchronous,
            trace: false,
        }
    }
}

impl Scenario {
    pub fn with_access(mut self, access: AccessMethod) -> Self {
        self.access = access;
        self
    }

    pub fn with_scheduler(mut self, scheduler: SchedulerKind) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn with_n_ar(mut self, n_ar: u32) -> Self {
        self.n_ar = n_ar;
        self
    }

    pub fn validate(&self) -> Result<(), MacError> {
        self.safety.validate()?;
        self.ar.validate()?;
        Ok(())
    }

    /// Dispatches to the runner for `self.access`.
    pub fn run(&self, phy: &PhyParams) -> Result<LatencyStats, MacError> {
        match self.access {
            AccessMethod::Dcf => run_dcf(self, phy),
            AccessMethod::Pcf => run_pcf(self, phy),
            AccessMethod::Hcca => run_hcca(self, phy, self.scheduler),
        }
    }
}
