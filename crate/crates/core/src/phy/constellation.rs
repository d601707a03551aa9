use alloc::vec::Vec;

use crate::math::sqrt;
use crate::Complex64;

/// Gray-coded unit-power constellations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    Bpsk,
    Qpsk,
    Qam16,
}

// Gray-coded 4-PAM levels indexed by the two bits (b0 b1).
const PAM4: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];

fn pam4_bits(x: f64) -> (u8, u8) {
    let b0 = (x > 0.0) as u8;
    let b1 = (x.abs() < 2.0) as u8;
    (b0, b1)
}

impl Constellation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Constellation::Bpsk => 1,
            Constellation::Qpsk => 2,
            Constellation::Qam16 => 4,
        }
    }

    /// Maps bits (one per byte, 0 or 1) to symbols. The bit count must be a
    /// multiple of `bits_per_symbol`.
    pub fn modulate(self, bits: &[u8]) -> Vec<Complex64> {
        let b = self.bits_per_symbol();
        debug_assert_eq!(bits.len() % b, 0);
        let sign = |bit: u8| if bit == 0 { -1.0 } else { 1.0 };
        bits.chunks_exact(b)
            .map(|c| match self {
                Constellation::Bpsk => Complex64::new(sign(c[0]), 0.0),
                Constellation::Qpsk => Complex64::new(sign(c[0]), sign(c[1])) / sqrt(2.0),
                Constellation::Qam16 => {
                    let i = PAM4[(c[0] * 2 + c[1]) as usize];
                    let q = PAM4[(c[2] * 2 + c[3]) as usize];
                    Complex64::new(i, q) / sqrt(10.0)
                }
            })
            .collect()
    }

    /// Hard decisions, appended to `out`.
    pub fn demodulate_into(self, symbols: &[Complex64], out: &mut Vec<u8>) {
        for s in symbols {
            match self {
                Constellation::Bpsk => out.push((s.re > 0.0) as u8),
                Constellation::Qpsk => {
                    out.push((s.re > 0.0) as u8);
                    out.push((s.im > 0.0) as u8);
                }
                Constellation::Qam16 => {
                    let (a, b) = pam4_bits(s.re * sqrt(10.0));
                    let (c, d) = pam4_bits(s.im * sqrt(10.0));
                    out.extend_from_slice(&[a, b, c, d]);
                }
            }
        }
    }

    pub fn demodulate(self, symbols: &[Complex64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        self.demodulate_into(symbols, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_bit_patterns(b: usize) -> Vec<u8> {
        (0..1usize << b).flat_map(|v| (0..b).map(move |i| ((v >> (b - 1 - i)) & 1) as u8)).collect()
    }

    #[test]
    fn round_trip_and_unit_power() {
        for c in [Constellation::Bpsk, Constellation::Qpsk, Constellation::Qam16] {
            let bits = all_bit_patterns(c.bits_per_symbol());
            let syms = c.modulate(&bits);
            assert_eq!(c.demodulate(&syms), bits);
            let p: f64 = syms.iter().map(|s| s.norm_sqr()).sum::<f64>() / syms.len() as f64;
            assert!((p - 1.0).abs() < 1e-12, "{c:?} {p}");
        }
    }

    #[test]
    fn qam16_neighbours_differ_in_one_bit() {
        let c = Constellation::Qam16;
        let bits = all_bit_patterns(4);
        let syms = c.modulate(&bits);
        let d = 2.0 / sqrt(10.0);
        for (i, a) in syms.iter().enumerate() {
            for (j, b) in syms.iter().enumerate() {
                if ((a - b).norm() - d).abs() < 1e-9 {
                    let diff = (0..4).filter(|&t| bits[4 * i + t] != bits[4 * j + t]).count();
                    assert_eq!(diff, 1);
                }
            }
        }
    }
}
