//! Dense complex matrices and a direct DFT.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{cis, sqrt, PI};
use crate::Complex64;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^H * x`.
    pub fn mul_vec_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for (row, xr) in self.data.chunks_exact(self.n).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * xr;
            }
        }
        out
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        CMatrix { n, data: out }
    }

    /// Gauss-Jordan inverse with partial pivoting. Returns `None` when a pivot
    /// falls below `tol` times the largest entry, i.e. the matrix is singular
    /// to working precision.
    pub fn inverse(&self, tol: f64) -> Option<CMatrix> {
        let n = self.n;
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return if n == 0 { Some(self.clone()) } else { None };
        }
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(n).data;
        for col in 0..n {
            let (piv, mag) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag < tol * scale {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                    inv.swap(piv * n + c, col * n + c);
                }
            }
            let p = a[col * n + col].inv();
            for c in 0..n {
                a[col * n + c] *= p;
                inv[col * n + c] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    let (ac, ic) = (a[col * n + c], inv[col * n + c]);
                    a[r * n + c] -= f * ac;
                    inv[r * n + c] -= f * ic;
                }
            }
        }
        Some(CMatrix { n, data: inv })
    }
}

/// Unitary DFT of fixed length, computed directly from a twiddle table.
#[derive(Debug, Clone)]
pub struct Dft {
    n: usize,
    twiddle: Vec<Complex64>,
    scale: f64,
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let twiddle = (0..n).map(|i| cis(-2.0 * PI * i as f64 / n as f64)).collect();
        Self {
            n,
            twiddle,
            scale: 1.0 / sqrt(n as f64),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn transform(&self, x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|f| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = 0usize;
                for v in x {
                    let w = self.twiddle[idx];
                    acc += v * if inverse { w.conj() } else { w };
                    idx += f;
                    if idx >= self.n {
                        idx %= self.n;
                    }
                }
                acc * self.scale
            })
            .collect()
    }

    pub fn forward(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.transform(x, false)
    }

    pub fn inverse(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.transform(x, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut r = SimRng::new(seed);
        (0..n).map(|_| r.complex_normal(1.0)).collect()
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut r = SimRng::new(3);
        let a = CMatrix::from_fn(12, |_, _| r.complex_normal(1.0));
        let inv = a.inverse(1e-12).unwrap();
        let p = a.mul(&inv);
        for i in 0..12 {
            for j in 0..12 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - Complex64::new(e, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_detected() {
        let a = CMatrix::from_fn(3, |r, c| Complex64::new((r + c) as f64, 0.0));
        assert!(a.inverse(1e-12).is_none());
    }

    #[test]
    fn adjoint_product_matches_definition() {
        let mut r = SimRng::new(5);
        let a = CMatrix::from_fn(6, |_, _| r.complex_normal(1.0));
        let x = random(6, 9);
        let y = a.mul_vec_adjoint(&x);
        for (c, yc) in y.iter().enumerate() {
            let direct: Complex64 = (0..6).map(|rr| a.get(rr, c).conj() * x[rr]).sum();
            assert!((direct - yc).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_round_trip_and_parseval() {
        let d = Dft::new(10);
        let x = random(10, 1);
        let f = d.forward(&x);
        let back = d.inverse(&f);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        let ex: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ef: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        assert!((ex - ef).abs() < 1e-10);
    }

    #[test]
    fn dft_of_impulse_is_flat() {
        let d = Dft::new(4);
        let mut x = vec![Complex64::new(0.0, 0.0); 4];
        x[0] = Complex64::new(1.0, 0.0);
        for v in d.forward(&x) {
            assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }
}
