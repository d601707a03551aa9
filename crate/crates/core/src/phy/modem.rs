use alloc::vec::Vec;

use super::config::{GfdmConfig, Receiver};
use super::grid::ResourceGrid;
use super::linalg::{CMatrix, Dft};
use super::pulse::prototype_filter;
use super::PhyError;
use crate::math::{cis, PI};
use crate::Complex64;

/// Pivot threshold below which the modulation matrix counts as singular.
const SINGULAR_TOL: f64 = 1e-9;

/// Block modulator and demodulator for one configuration.
///
/// Column `m*K + k` of the modulation matrix is
/// `a[n] = g[(n - m*K) mod N] * exp(j*2*pi*k*n/K)`.
#[derive(Debug, Clone)]
pub struct Modem {
    config: GfdmConfig,
    a: CMatrix,
    zf: Option<CMatrix>,
    dft: Dft,
}

impl Modem {
    /// Builds the modulation matrix; zero forcing also needs its inverse and
    /// fails with [`PhyError::NonInvertible`] if there is none.
    pub fn new(config: &GfdmConfig) -> Result<Self, PhyError> {
        config.validate()?;
        let (k, n) = (config.k, config.n());
        let g = prototype_filter(config);
        let a = CMatrix::from_fn(n, |row, col| {
            let (m, kk) = (col / k, col % k);
            let shift = (row + n - (m * k) % n) % n;
            let phase = 2.0 * PI * ((kk * row) % k) as f64 / k as f64;
            cis(phase) * g[shift]
        });
        let zf = match config.receiver {
            Receiver::ZeroForcing => Some(a.inverse(SINGULAR_TOL).ok_or(PhyError::NonInvertible)?),
            Receiver::MatchedFilter => None,
        };
        Ok(Self {
            config: config.clone(),
            a,
            zf,
            dft: Dft::new(n),
        })
    }

    pub fn config(&self) -> &GfdmConfig {
        &self.config
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a
    }

    pub fn dft(&self) -> &Dft {
        &self.dft
    }

    /// `x = A d`.
    pub fn modulate(&self, grid: &ResourceGrid) -> Result<Vec<Complex64>, PhyError> {
        if grid.k() != self.config.k || grid.m() != self.config.m {
            return Err(PhyError::SymbolCount {
                expected: self.config.n(),
                got: grid.k() * grid.m(),
            });
        }
        Ok(self.a.mul_vec(grid.as_slice()))
    }

    /// Equalizes each of the N frequency bins by `1/H` (bins with `|H|`
    /// below 1e-12 are zeroed), then applies the receiver matrix.
    pub fn demodulate(&self, samples: &[Complex64], h: Option<&[Complex64]>) -> Result<ResourceGrid, PhyError> {
        let n = self.config.n();
        if samples.len() != n {
            return Err(PhyError::SampleCount {
                expected: n,
                got: samples.len(),
            });
        }
        let eq;
        let y = match h {
            None => samples,
            Some(h) => {
                if h.len() != n {
                    return Err(PhyError::SampleCount { expected: n, got: h.len() });
                }
                let spec: Vec<Complex64> = self
                    .dft
                    .forward(samples)
                    .iter()
                    .zip(h)
                    .map(|(y, h)| if h.norm() < 1e-12 { Complex64::new(0.0, 0.0) } else { y / h })
                    .collect();
                eq = self.dft.inverse(&spec);
                &eq[..]
            }
        };
        let d = match &self.zf {
            Some(inv) => inv.mul_vec(y),
            None => self.a.mul_vec_adjoint(y),
        };
        Ok(ResourceGrid::from_vec(self.config.k, self.config.m, d))
    }
}
