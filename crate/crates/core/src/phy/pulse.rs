use alloc::vec::Vec;

use super::config::{GfdmConfig, Pulse};
use crate::math::{cos, sin, sqrt, PI};

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        sin(PI * x) / (PI * x)
    }
}

/// Raised cosine with symbol period 1 at time `t`.
fn raised_cosine(t: f64, a: f64) -> f64 {
    let d = 1.0 - (2.0 * a * t) * (2.0 * a * t);
    if a > 0.0 && d.abs() < 1e-10 {
        PI / 4.0 * sinc(1.0 / (2.0 * a))
    } else {
        sinc(t) * cos(PI * a * t) / d
    }
}

/// Root raised cosine with symbol period 1 at time `t`.
fn root_raised_cosine(t: f64, a: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - a + 4.0 * a / PI;
    }
    if a > 0.0 && (1.0 - (4.0 * a * t) * (4.0 * a * t)).abs() < 1e-10 {
        let s = PI / (4.0 * a);
        return a / sqrt(2.0) * ((1.0 + 2.0 / PI) * sin(s) + (1.0 - 2.0 / PI) * cos(s));
    }
    let num = sin(PI * t * (1.0 - a)) + 4.0 * a * t * cos(PI * t * (1.0 + a));
    let den = PI * t * (1.0 - (4.0 * a * t) * (4.0 * a * t));
    num / den
}

/// Prototype filter of `N = K*M` samples with unit energy. RC and RRC are
/// sampled circularly around sample 0 with a symbol period of K samples.
pub fn prototype_filter(config: &GfdmConfig) -> Vec<f64> {
    let (k, n) = (config.k, config.n());
    let mut g: Vec<f64> = (0..n)
        .map(|i| {
            let t = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
            let t = t / k as f64;
            match config.pulse {
                Pulse::Rect => {
                    if i < k {
                        1.0
                    } else {
                        0.0
                    }
                }
                Pulse::RaisedCosine { rolloff } => raised_cosine(t, rolloff),
                Pulse::RootRaisedCosine { rolloff } => root_raised_cosine(t, rolloff),
            }
        })
        .collect();
    let e = sqrt(g.iter().map(|x| x * x).sum::<f64>());
    for x in g.iter_mut() {
        *x /= e;
    }
    g
}
