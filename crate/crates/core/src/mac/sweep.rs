use alloc::vec::Vec;

use crate::rng::splitmix64;

use super::params::PhyParams;
use super::traffic::ClassKind;
use super::{MacError, Scenario};

/// One output row: a class's latency at one AR station count.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_ar: u32,
    pub class: ClassKind,
    pub mean_ms: f64,
    pub max_ms: f64,
    pub miss_rate: f64,
    pub samples: u64,
}

/// Seed used for the sweep point with `n_ar` AR stations.
pub fn point_seed(seed: u64, n_ar: u32) -> u64 {
    splitmix64(seed ^ splitmix64(n_ar as u64))
}

/// Runs one sweep point; the seed depends only on `(base.seed, n_ar)`.
pub fn sweep_point(base: &Scenario, phy: &PhyParams, n_ar: u32) -> Result<[SweepRow; 2], MacError> {
    let mut sc = base.clone();
    sc.n_ar = n_ar;
    sc.seed = point_seed(base.seed, n_ar);
    let stats = sc.run(phy)?;
    let row = |class| {
        let c = stats.class(class);
        SweepRow {
            n_ar,
            class,
            mean_ms: c.mean_ms(),
            max_ms: c.max_ms(),
            miss_rate: c.miss_rate(),
            samples: c.samples(),
        }
    };
    Ok([row(ClassKind::Safety), row(ClassKind::Ar)])
}

/// Sequential sweep over `n_ar_values`; two rows (safety, AR) per point.
pub fn sweep(base: &Scenario, phy: &PhyParams, n_ar_values: &[u32]) -> Result<Vec<SweepRow>, MacError> {
    let mut rows = Vec::with_capacity(2 * n_ar_values.len());
    for &n in n_ar_values {
        rows.extend(sweep_point(base, phy, n)?);
    }
    Ok(rows)
}
