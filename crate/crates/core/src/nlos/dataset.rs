use alloc::vec::Vec;

use super::{Cir, Label, NlosError, MIN_TAPS};
use crate::math::{cis, db_to_lin, exp, log10, sqrt, PI};
use crate::rng::SimRng;
use crate::Complex64;

/// Synthetic CIR generator. Both classes use an exponential power-delay
/// profile `p_l ~ exp(-l / tau)`; LOS adds a Rician specular part on tap 0,
/// NLOS is Rayleigh throughout with a longer delay spread.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCirParams {
    pub n_per_class: usize,
    pub tap_count: usize,
    pub k_factor_db: f64,
    /// LOS decay constant, taps.
    pub los_delay_spread: f64,
    /// NLOS decay constant over the LOS one.
    pub nlos_spread_ratio: f64,
    /// Scale each CIR to unit energy.
    pub normalize: bool,
    pub seed: u64,
}

impl Default for SyntheticCirParams {
    fn default() -> Self {
        Self {
            n_per_class: 1000,
            tap_count: 16,
            k_factor_db: 6.0,
            los_delay_spread: 2.0,
            nlos_spread_ratio: 3.0,
            normalize: true,
            seed: 1,
        }
    }
}

impl SyntheticCirParams {
    pub fn validate(&self) -> Result<(), NlosError> {
        if self.n_per_class < 100 {
            return Err(NlosError::Params("n_per_class must be at least 100"));
        }
        if self.tap_count < MIN_TAPS {
            return Err(NlosError::TooFewTaps(self.tap_count));
        }
        if !(self.los_delay_spread > 0.0 && self.nlos_spread_ratio > 0.0) {
            return Err(NlosError::Params("delay spreads must be positive"));
        }
        if !self.k_factor_db.is_finite() {
            return Err(NlosError::Params("K-factor must be finite"));
        }
        Ok(())
    }
}

fn pdp(taps: usize, tau: f64) -> Vec<f64> {
    let p: Vec<f64> = (0..taps).map(|l| exp(-(l as f64) / tau)).collect();
    let s: f64 = p.iter().sum();
    p.into_iter().map(|x| x / s).collect()
}

fn draw(params: &SyntheticCirParams, label: Label, rng: &mut SimRng) -> Cir {
    let (tau, k) = match label {
        Label::Los => (params.los_delay_spread, db_to_lin(params.k_factor_db)),
        _ => (params.los_delay_spread * params.nlos_spread_ratio, 0.0),
    };
    let p = pdp(params.tap_count, tau);
    let mut taps: Vec<Complex64> = p.iter().map(|&pl| rng.complex_normal(pl)).collect();
    if k > 0.0 {
        let spec = sqrt(k / (k + 1.0) * p[0]) * cis(2.0 * PI * rng.uniform());
        taps[0] = spec + taps[0] * sqrt(1.0 / (k + 1.0));
    }
    if params.normalize {
        let e = sqrt(taps.iter().map(|t| t.norm_sqr()).sum::<f64>());
        if e > 0.0 {
            for t in taps.iter_mut() {
                *t /= e;
            }
        }
    }
    Cir { taps, label }
}

/// `n_per_class` LOS CIRs followed by `n_per_class` NLOS CIRs. CIR `i` of
/// class `c` draws from stream `2*i + c` of the seed.
pub fn generate_dataset(params: &SyntheticCirParams) -> Result<Vec<Cir>, NlosError> {
    params.validate()?;
    let mut out = Vec::with_capacity(2 * params.n_per_class);
    for (c, label) in [Label::Los, Label::Nlos].into_iter().enumerate() {
        for i in 0..params.n_per_class {
            let mut rng = SimRng::stream(params.seed, 2 * i as u64 + c as u64);
            out.push(draw(params, label, &mut rng));
        }
    }
    Ok(out)
}

/// Moment estimate of the Rician K-factor (dB) of tap 0 over `cirs`, from
/// `gamma = Var(|h|^2) / E[|h|^2]^2 = (1 + 2K) / (1 + K)^2`.
pub fn estimate_k_factor_db(cirs: &[Cir]) -> f64 {
    let n = cirs.len() as f64;
    let p: Vec<f64> = cirs.iter().map(|c| c.taps[0].norm_sqr()).collect();
    let m = p.iter().sum::<f64>() / n;
    let v = p.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    let gamma = (v / (m * m)).clamp(0.0, 1.0);
    let r = sqrt(1.0 - gamma);
    let k = r / (1.0 - r);
    10.0 * log10(k)
}
