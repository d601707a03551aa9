//! Two-way ranging, trilateration and the server-driven localization round.

mod geometry;
mod server;
mod solver;
mod twr;

pub use geometry::Vec3;
pub use server::{monte_carlo, random_positions, rmse, run_trials, LocalizationServer, LocationFix, Trial};
pub use solver::{exact_measurements, trilaterate, PositionEstimate, DEGENERACY_LIMIT};
pub use twr::{simulate_exchange, tof_from_twr, RangingExchange, RangingNoise, SPEED_OF_LIGHT};

/// A fixed reference station at a known position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub id: u32,
    pub position: Vec3,
}

impl Anchor {
    pub fn new(id: u32, x: f64, y: f64, z: f64) -> Self {
        Self {
            id,
            position: Vec3::new(x, y, z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum LocError {
    #[error("invalid exchange: t_round {t_round} s < t_reply {t_reply} s")]
    InvalidExchange { t_round: f64, t_reply: f64 },
    #[error("need at least 4 measurements, got {0}")]
    TooFewMeasurements(usize),
    #[error("degenerate geometry (eigenvalue ratio {condition:.3e})")]
    DegenerateGeometry { condition: f64 },
    #[error("insufficient ranging: {successful} successful exchanges")]
    InsufficientRanging { successful: usize },
    #[error("duplicate anchor id {0}")]
    DuplicateAnchor(u32),
    #[error("invalid ranging noise: {0}")]
    Noise(&'static str),
}
