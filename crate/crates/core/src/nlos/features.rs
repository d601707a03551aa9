use alloc::vec::Vec;

use super::NlosError;
use crate::math::sqrt;
use crate::Complex64;

/// Population moments of the tap amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub mu: f64,
    pub sigma: f64,
    pub skewness: f64,
    /// Raw (not excess) kurtosis.
    pub kurtosis: f64,
    /// `sigma == 0`; skewness and kurtosis are then reported as 0.
    pub degenerate: bool,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 4] {
        [self.mu, self.sigma, self.skewness, self.kurtosis]
    }
}

/// `mu = mean(a)`, `sigma = sqrt(m2)`, `s = m3 / sigma^3`,
/// `kappa = m4 / sigma^4` with central moments `m_k` divided by n.
pub fn extract_features(taps: &[Complex64]) -> Result<FeatureVector, NlosError> {
    if taps.len() < 2 {
        return Err(NlosError::TooFewTaps(taps.len()));
    }
    let n = taps.len() as f64;
    let a: Vec<f64> = taps.iter().map(|t| t.norm()).collect();
    let mu = a.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for x in &a {
        let d = x - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let sigma = sqrt(m2);
    if sigma == 0.0 {
        return Ok(FeatureVector {
            mu,
            sigma,
            skewness: 0.0,
            kurtosis: 0.0,
            degenerate: true,
        });
    }
    Ok(FeatureVector {
        mu,
        sigma,
        skewness: m3 / (m2 * sigma),
        kurtosis: m4 / (m2 * m2),
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureSubset {
    /// sigma
    S1,
    /// skewness, kurtosis
    S2,
    /// sigma, skewness, kurtosis
    S3,
    /// mu, sigma, skewness, kurtosis
    S4,
}

impl FeatureSubset {
    pub const ALL: [FeatureSubset; 4] = [FeatureSubset::S1, FeatureSubset::S2, FeatureSubset::S3, FeatureSubset::S4];

    /// Positions in [`FeatureVector::as_array`].
    pub fn indices(self) -> &'static [usize] {
        match self {
            FeatureSubset::S1 => &[1],
            FeatureSubset::S2 => &[2, 3],
            FeatureSubset::S3 => &[1, 2, 3],
            FeatureSubset::S4 => &[0, 1, 2, 3],
        }
    }

    pub fn select(self, f: &FeatureVector) -> Vec<f64> {
        let a = f.as_array();
        self.indices().iter().map(|&i| a[i]).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSubset::S1 => "s1",
            FeatureSubset::S2 => "s2",
            FeatureSubset::S3 => "s3",
            FeatureSubset::S4 => "s4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name().eq_ignore_ascii_case(s))
    }
}
