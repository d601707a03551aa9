//! GFDM transceiver chain: resource mapping, pulse-shaped block modulation,
//! framing, Schmidl-Cox synchronization, least-squares channel estimation,
//! demodulation, channel models and a Monte-Carlo BER harness.

mod ber;
mod channel;
mod config;
mod constellation;
mod estimate;
mod frame;
mod grid;
pub mod linalg;
mod modem;
mod pulse;
mod sync;

pub use ber::{ber_run, es_n0_db, frame_samples, BerOptions, BerResult, Estimator};
pub use channel::ChannelModel;
pub use config::{GfdmConfig, LatencyReport, Pulse, Receiver};
pub use constellation::Constellation;
pub use estimate::{ls_channel_estimate, ls_channel_estimate_with_pilots};
pub use frame::{build_frame, preamble, Frame};
pub use grid::{demap_resources, map_resources, ResourceGrid};
pub use modem::Modem;
pub use pulse::prototype_filter;
pub use sync::{schmidl_cox_sync, SyncResult};

/// Errors raised by the PHY chain.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhyError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("expected {expected} symbols, got {got}")]
    SymbolCount { expected: usize, got: usize },
    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error("guard length {guard} exceeds block length {n}")]
    GuardTooLong { guard: usize, n: usize },
    #[error("non-invertible configuration")]
    NonInvertible,
    #[error("no frame detected")]
    NoFrame,
    #[error("no usable pilot bins")]
    NoPilots,
}
