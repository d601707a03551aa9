use super::{Anchor, LocError, Vec3};
use crate::rng::SimRng;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Timestamps of one two-way ranging exchange, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangingExchange {
    pub anchor_id: u32,
    /// Measured by the initiator: request sent to response received.
    pub t_round: f64,
    /// Measured by the responder: request received to response sent.
    pub t_reply: f64,
}

/// Gaussian distance error with a constant offset, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RangingNoise {
    pub sigma_d: f64,
    pub bias: f64,
}

impl RangingNoise {
    pub fn validate(&self) -> Result<(), LocError> {
        if !(self.sigma_d >= 0.0) {
            return Err(LocError::Noise("sigma_d must be non-negative"));
        }
        if !self.bias.is_finite() {
            return Err(LocError::Noise("bias must be finite"));
        }
        Ok(())
    }
}

/// `d = c * (t_round - t_reply) / 2`.
pub fn tof_from_twr(x: &RangingExchange) -> Result<f64, LocError> {
    if x.t_round < x.t_reply || x.t_round.is_nan() || x.t_reply.is_nan() {
        return Err(LocError::InvalidExchange {
            t_round: x.t_round,
            t_reply: x.t_reply,
        });
    }
    Ok(SPEED_OF_LIGHT * (x.t_round - x.t_reply) / 2.0)
}

/// Simulated exchange between a mobile at `ms` and `anchor`. The distance
/// error is drawn from stream `anchor.id` of `seed`.
pub fn simulate_exchange(ms: Vec3, anchor: &Anchor, noise: RangingNoise, processing_delay: f64, seed: u64) -> RangingExchange {
    let mut rng = SimRng::stream(seed, anchor.id as u64);
    let err = if noise.sigma_d > 0.0 { noise.sigma_d * rng.normal() } else { 0.0 };
    let d = ms.distance(anchor.position);
    RangingExchange {
        anchor_id: anchor.id,
        t_round: 2.0 * d / SPEED_OF_LIGHT + processing_delay + 2.0 * err / SPEED_OF_LIGHT + 2.0 * noise.bias / SPEED_OF_LIGHT,
        t_reply: processing_delay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(t_round: f64, t_reply: f64) -> RangingExchange {
        RangingExchange {
            anchor_id: 0,
            t_round,
            t_reply,
        }
    }

    #[test]
    fn distance_examples() {
        assert!((tof_from_twr(&ex(1000e-9, 800e-9)).unwrap() - 29.979_245_8).abs() < 1e-6);
        assert_eq!(tof_from_twr(&ex(5e-6, 5e-6)).unwrap(), 0.0);
        assert!((tof_from_twr(&ex(2e-6, 0.0)).unwrap() - 299.792_458).abs() < 1e-9);
    }

    #[test]
    fn negative_flight_time_rejected() {
        assert!(matches!(tof_from_twr(&ex(1e-6, 2e-6)), Err(LocError::InvalidExchange { .. })));
    }

    #[test]
    fn fifteen_metres() {
        let a = Anchor::new(1, 15.0, 0.0, 0.0);
        let x = simulate_exchange(Vec3::default(), &a, RangingNoise::default(), 0.0, 1);
        assert!((x.t_round * 1e9 - 100.069).abs() < 1e-3);
        assert!((tof_from_twr(&x).unwrap() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn bias_propagates() {
        let a = Anchor::new(1, 0.0, 7.0, 0.0);
        let n = RangingNoise { sigma_d: 0.0, bias: 2.0 };
        let x = simulate_exchange(Vec3::default(), &a, n, 1e-4, 1);
        assert!((tof_from_twr(&x).unwrap() - 9.0).abs() < 1e-6);
    }

    #[test]
    fn seeded() {
        let a = Anchor::new(3, 1.0, 2.0, 3.0);
        let n = RangingNoise { sigma_d: 1.0, bias: 0.0 };
        let x = simulate_exchange(Vec3::default(), &a, n, 1e-5, 9);
        assert_eq!(x, simulate_exchange(Vec3::default(), &a, n, 1e-5, 9));
        assert_ne!(x, simulate_exchange(Vec3::default(), &a, n, 1e-5, 10));
    }
}
