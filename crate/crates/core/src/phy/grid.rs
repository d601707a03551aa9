use alloc::vec;
use alloc::vec::Vec;

use super::config::GfdmConfig;
use super::PhyError;
use crate::Complex64;

/// K x M data grid, stored column by column (`index = m*K + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    k: usize,
    m: usize,
    data: Vec<Complex64>,
}

impl ResourceGrid {
    pub fn zeros(k: usize, m: usize) -> Self {
        Self {
            k,
            m,
            data: vec![Complex64::new(0.0, 0.0); k * m],
        }
    }

    pub(crate) fn from_vec(k: usize, m: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), k * m);
        Self { k, m, data }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.data[m * self.k + k]
    }

    pub fn set(&mut self, k: usize, m: usize, v: Complex64) {
        self.data[m * self.k + k] = v;
    }

    /// Column-major view (`m*K + k`), the modulation matrix's input order.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

/// Fills active rows column by column: all active subcarriers of subsymbol 0,
/// then subsymbol 1, and so on. Inactive rows stay zero.
pub fn map_resources(symbols: &[Complex64], config: &GfdmConfig) -> Result<ResourceGrid, PhyError> {
    let expected = config.symbols_per_block();
    if symbols.len() != expected {
        return Err(PhyError::SymbolCount {
            expected,
            got: symbols.len(),
        });
    }
    let mut g = ResourceGrid::zeros(config.k, config.m);
    let mut it = symbols.iter();
    for m in 0..config.m {
        for &k in &config.active {
            g.set(k, m, *it.next().expect("length checked"));
        }
    }
    Ok(g)
}

/// Inverse of [`map_resources`].
pub fn demap_resources(grid: &ResourceGrid, config: &GfdmConfig) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(config.symbols_per_block());
    for m in 0..config.m {
        for &k in &config.active {
            out.push(grid.get(k, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Pulse;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lexicographic_placement() {
        let cfg = GfdmConfig::new(4, 2, Pulse::Rect);
        let s: Vec<_> = (0..8).map(|i| c(i as f64)).collect();
        let g = map_resources(&s, &cfg).unwrap();
        assert_eq!(g.get(0, 0), c(0.0));
        assert_eq!(g.get(3, 0), c(3.0));
        assert_eq!(g.get(0, 1), c(4.0));
        assert_eq!(g.get(3, 1), c(7.0));
    }

    #[test]
    fn inactive_rows_zero() {
        let cfg = GfdmConfig::new(4, 2, Pulse::Rect).with_active(vec![1, 2]);
        let s: Vec<_> = (1..=4).map(|i| c(i as f64)).collect();
        let g = map_resources(&s, &cfg).unwrap();
        for m in 0..2 {
            assert_eq!(g.get(0, m), c(0.0));
            assert_eq!(g.get(3, m), c(0.0));
        }
        assert_eq!(demap_resources(&g, &cfg), s);
    }

    #[test]
    fn wrong_count() {
        let cfg = GfdmConfig::new(4, 2, Pulse::Rect);
        assert_eq!(
            map_resources(&[c(1.0)], &cfg),
            Err(PhyError::SymbolCount { expected: 8, got: 1 })
        );
    }
}
