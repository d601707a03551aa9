use alloc::vec::Vec;

use super::linalg::Dft;
use super::PhyError;
use crate::Complex64;

/// Bins whose transmitted magnitude falls below this are not pilots.
pub const PILOT_FLOOR: f64 = 1e-12;

/// Least-squares estimate `RX/TX` on every bin where the transmitted
/// preamble has energy, linearly interpolated elsewhere.
pub fn ls_channel_estimate(rx: &[Complex64], tx: &[Complex64]) -> Result<Vec<Complex64>, PhyError> {
    let pilots = alloc::vec![true; tx.len()];
    ls_channel_estimate_with_pilots(rx, tx, &pilots)
}

/// As [`ls_channel_estimate`] restricted to the bins flagged in `pilots`.
/// Real and imaginary parts are interpolated independently; bins outside
/// the first and last pilot take the nearest pilot's value.
pub fn ls_channel_estimate_with_pilots(
    rx: &[Complex64],
    tx: &[Complex64],
    pilots: &[bool],
) -> Result<Vec<Complex64>, PhyError> {
    let n = tx.len();
    if rx.len() != n || pilots.len() != n {
        return Err(PhyError::SampleCount {
            expected: n,
            got: rx.len().min(pilots.len()),
        });
    }
    let dft = Dft::new(n);
    let (rf, tf) = (dft.forward(rx), dft.forward(tx));
    let known: Vec<(usize, Complex64)> = (0..n)
        .filter(|&f| pilots[f] && tf[f].norm() >= PILOT_FLOOR)
        .map(|f| (f, rf[f] / tf[f]))
        .collect();
    if known.is_empty() {
        return Err(PhyError::NoPilots);
    }
    let mut h = Vec::with_capacity(n);
    let mut next = 0usize;
    for f in 0..n {
        while next < known.len() && known[next].0 < f {
            next += 1;
        }
        let v = match (next.checked_sub(1).map(|i| known[i]), known.get(next)) {
            (_, Some(&(fi, hi))) if fi == f => hi,
            (Some((f0, h0)), Some(&(f1, h1))) => {
                let t = (f - f0) as f64 / (f1 - f0) as f64;
                h0 + (h1 - h0) * t
            }
            (Some((_, h0)), None) => h0,
            (None, Some(&(_, h1))) => h1,
            (None, None) => unreachable!("known is non-empty"),
        };
        h.push(v);
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cis, PI};
    use crate::phy::{preamble, GfdmConfig};
    use crate::rng::SimRng;
    use alloc::vec;

    fn circular(x: &[Complex64], taps: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|i| taps.iter().enumerate().map(|(l, t)| t * x[(i + n - l) % n]).sum())
            .collect()
    }

    fn taps_dft(taps: &[Complex64], n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|f| {
                taps.iter()
                    .enumerate()
                    .map(|(l, t)| t * cis(-2.0 * PI * (f * l) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn random_tx(n: usize) -> Vec<Complex64> {
        let mut r = SimRng::new(21);
        (0..n).map(|_| r.complex_normal(1.0)).collect()
    }

    #[test]
    fn ideal_channel_is_unity() {
        let tx = random_tx(32);
        for v in ls_channel_estimate(&tx, &tx).unwrap() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_tap_channel_matches_tap_dft() {
        let tx = random_tx(32);
        let taps = [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        let h = ls_channel_estimate(&circular(&tx, &taps), &tx).unwrap();
        for (a, b) in h.iter().zip(taps_dft(&taps, 32)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn odd_bins_interpolated_for_linear_phase() {
        let n = 64;
        let tx = random_tx(n);
        // A small delay gives a slowly rotating phase ramp across bins.
        let delay = 0.3;
        let truth: Vec<Complex64> = (0..n).map(|f| cis(-2.0 * PI * f as f64 * delay / n as f64)).collect();
        let dft = Dft::new(n);
        let rx = dft.inverse(&dft.forward(&tx).iter().zip(&truth).map(|(a, b)| a * b).collect::<Vec<_>>());
        let pilots: Vec<bool> = (0..n).map(|f| f % 2 == 0).collect();
        let h = ls_channel_estimate_with_pilots(&rx, &tx, &pilots).unwrap();
        for f in (1..n - 1).step_by(2) {
            assert!((h[f] - truth[f]).norm() <= 0.01 * truth[f].norm(), "bin {f}");
        }
        assert_eq!(h[n - 1], h[n - 2]);
    }

    #[test]
    fn repeated_preamble_excludes_odd_bins() {
        let cfg = GfdmConfig::ofdm(32);
        let p = preamble(&cfg, 2);
        let gain = Complex64::new(0.0, 2.0);
        let rx: Vec<_> = p.iter().map(|v| v * gain).collect();
        for v in ls_channel_estimate(&rx, &p).unwrap() {
            assert!((v - gain).norm() < 1e-12);
        }
    }

    #[test]
    fn no_pilots() {
        let z = vec![Complex64::new(0.0, 0.0); 8];
        assert_eq!(ls_channel_estimate(&z, &z), Err(PhyError::NoPilots));
    }
}
