//! Littlewood-Paley dyadic frequency projections.

use crate::spectral::field::SpectralField;
use crate::{Result, ZkError};

/// Dyadic frequency block label: `N = 0` selects `|m| in [0, 1)` (the zero
/// mode only); `N >= 1` a power of two selects the shell `|m| in [N, 2N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicBlock(u32);

impl DyadicBlock {
    pub fn new(n: u32) -> Result<Self> {
        if n != 0 && !n.is_power_of_two() {
            return Err(ZkError::InvalidParameter(format!(
                "dyadic block must be 0 or a power of two, got {n}"
            )));
        }
        Ok(Self(n))
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    /// `1 v N = max(1, N)`, the weight appearing in the norm equivalence.
    pub fn one_vee(&self) -> u32 {
        self.0.max(1)
    }

    /// Shell membership test on the integer lattice, exact: `N <= |m| < 2N`
    /// checked as `N^2 <= m1^2 + m2^2 < 4 N^2`.
    pub fn contains(&self, m1: i64, m2: i64) -> bool {
        let r2 = (m1 * m1 + m2 * m2) as u128;
        let n = self.0 as u128;
        if self.0 == 0 {
            r2 < 1
        } else {
            n * n <= r2 && r2 < 4 * n * n
        }
    }

    /// Dyadic blocks whose shells intersect the retained lattice of a grid
    /// with half-sizes `hx = Mx/2`, `hy = My/2`.
    pub fn covering(hx: usize, hy: usize) -> Vec<DyadicBlock> {
        let rmax2 = (hx * hx + hy * hy) as u128;
        let mut blocks = vec![DyadicBlock(0)];
        let mut n = 1u32;
        while (n as u128) * (n as u128) <= rmax2 {
            blocks.push(DyadicBlock(n));
            n = n.checked_mul(2).expect("dyadic overflow");
        }
        blocks
    }
}

/// Littlewood-Paley projection `P_N`: keeps coefficients with `|m|` in the
/// block's shell, zeroes the rest. Idempotent.
pub fn lp_project(field: &SpectralField, block: DyadicBlock) -> SpectralField {
    let mut out = field.clone();
    let grid = out.grid();
    for idx in 0..out.coeffs().len() {
        let (m1, m2) = grid.freq_at(idx);
        if !block.contains(m1, m2) {
            out.coeffs_mut()[idx] = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use num_complex::Complex64;
    use rand::prelude::*;

    fn grid() -> Grid {
        Grid::new(16, 16).unwrap()
    }

    #[test]
    fn p0_keeps_only_zero_mode() {
        let mut f = SpectralField::zeros(grid());
        f.set(0, 0, Complex64::new(2.0, 0.0)).unwrap();
        f.set(1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let p0 = lp_project(&f, DyadicBlock::new(0).unwrap());
        assert_eq!(p0.get(0, 0), Complex64::new(2.0, 0.0));
        assert_eq!(p0.get(1, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn shell_boundaries() {
        // |m| = 1 lies in [1, 2), not in [2, 4)
        let f = SpectralField::from_modes(grid(), &[((1, 0), Complex64::new(1.0, 0.0))]).unwrap();
        let p1 = lp_project(&f, DyadicBlock::new(1).unwrap());
        let p2 = lp_project(&f, DyadicBlock::new(2).unwrap());
        assert_eq!(p1.get(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(p2.get(1, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn shells_partition_l2() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = grid();
        let mut f = SpectralField::zeros(g);
        for c in f.coeffs_mut() {
            *c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let total = f.l2_norm().powi(2);
        let blocks = DyadicBlock::covering(g.mx() / 2, g.my() / 2);
        let sum: f64 = blocks
            .iter()
            .map(|&b| lp_project(&f, b).l2_norm().powi(2))
            .sum();
        assert!((sum - total).abs() <= 1e-12 * total);

        // idempotence and mutual orthogonality
        for &b in &blocks {
            let p = lp_project(&f, b);
            assert_eq!(lp_project(&p, b), p);
            for &b2 in &blocks {
                if b2 != b {
                    let q = lp_project(&p, b2);
                    assert!(q.max_coeff_abs() == 0.0);
                }
            }
        }
    }
}
