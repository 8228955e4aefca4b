//! Spectral and collocation representations of functions on the torus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::numerics::pairwise_sum;
use crate::{Result, ZkError};

/// Regularity index `s` of the Sobolev space `H^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(ZkError::NonFinite("SobolevIndex"));
        }
        Ok(Self(s))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Truncated lattice of complex Fourier coefficients under the convention
/// `f(x) = sum_m c_m exp(i m.x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.mode_count()],
        }
    }

    /// Field with the given nonzero coefficients; rejects modes outside the
    /// retained lattice.
    pub fn from_modes(grid: Grid, modes: &[((i64, i64), Complex64)]) -> Result<Self> {
        let mut f = Self::zeros(grid);
        for &((m1, m2), c) in modes {
            f.set(m1, m2, c)?;
        }
        Ok(f)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `(m1, m2)`; zero off the retained lattice.
    pub fn get(&self, m1: i64, m2: i64) -> Complex64 {
        self.grid
            .index_of(m1, m2)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, m1: i64, m2: i64, c: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(m1, m2)
            .ok_or(ZkError::ModeOutOfRange(m1, m2))?;
        self.coeffs[idx] = c;
        Ok(())
    }

    /// Applies a Fourier multiplier `c_m <- mult(m) * c_m` in place.
    pub fn apply_multiplier<F: FnMut(i64, i64) -> Complex64>(&mut self, mut mult: F) {
        for idx in 0..self.coeffs.len() {
            let (m1, m2) = self.grid.freq_at(idx);
            self.coeffs[idx] *= mult(m1, m2);
        }
    }

    /// Spectral derivative along x (multiplier `i*m1`).
    pub fn derivative_x(&self) -> Self {
        let mut out = self.clone();
        out.apply_multiplier(|m1, _| Complex64::new(0.0, m1 as f64));
        out
    }

    /// Spectral derivative along y (multiplier `i*m2`).
    pub fn derivative_y(&self) -> Self {
        let mut out = self.clone();
        out.apply_multiplier(|_, m2| Complex64::new(0.0, m2 as f64));
        out
    }

    /// `L^2(T^2)` norm: `2*pi * sqrt(sum |c_m|^2)`.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.coeffs.iter().map(|c| c.norm_sqr()).collect();
        std::f64::consts::TAU * pairwise_sum(&sq).sqrt()
    }

    /// `H^s` norm with the `J^s` multiplier:
    /// `||f||_{H^s}^2 = (2*pi)^2 sum (1+|m|^2)^s |c_m|^2`.
    pub fn sobolev_norm(&self, s: SobolevIndex) -> f64 {
        let s = s.value();
        let terms: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let (m1, m2) = self.grid.freq_at(idx);
                let w = 1.0 + (m1 * m1 + m2 * m2) as f64;
                w.powf(s) * c.norm_sqr()
            })
            .collect();
        std::f64::consts::TAU * pairwise_sum(&terms).sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum deviation from the Hermitian symmetry `c_{-m} = conj(c_m)`
    /// (mirror indices wrapped, so Nyquist rows check self-conjugacy).
    pub fn hermitian_defect(&self) -> f64 {
        let mx = self.grid.mx();
        let my = self.grid.my();
        let mut defect = 0.0f64;
        for iy in 0..my {
            for ix in 0..mx {
                let jx = (mx - ix) % mx;
                let jy = (my - iy) % my;
                let d = (self.coeffs[iy * mx + ix] - self.coeffs[jy * mx + jx].conj()).norm();
                defect = defect.max(d);
            }
        }
        defect
    }

    /// True if the field represents a real function to relative tolerance
    /// `tol` (defect measured against the largest coefficient).
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_coeff_abs().max(f64::MIN_POSITIVE);
        self.hermitian_defect() <= tol * scale
    }

    /// Projects onto the Hermitian-symmetric part.
    pub fn symmetrize(&mut self) {
        let mx = self.grid.mx();
        let my = self.grid.my();
        let old = self.coeffs.clone();
        for iy in 0..my {
            for ix in 0..mx {
                let jx = (mx - ix) % mx;
                let jy = (my - iy) % my;
                self.coeffs[iy * mx + ix] = 0.5 * (old[iy * mx + ix] + old[jy * mx + jx].conj());
            }
        }
    }

    /// 2/3-rule dealiasing: zeroes `|m1| > Mx/3` or `|m2| > My/3`.
    pub fn dealias_in_place(&mut self) {
        let lx = self.grid.dealias_limit_x();
        let ly = self.grid.dealias_limit_y();
        for idx in 0..self.coeffs.len() {
            let (m1, m2) = self.grid.freq_at(idx);
            if m1.abs() > lx || m2.abs() > ly {
                self.coeffs[idx] = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn dealiased(&self) -> Self {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    /// True if every coefficient outside the 2/3 band is exactly zero.
    pub fn is_dealiased(&self) -> bool {
        let lx = self.grid.dealias_limit_x();
        let ly = self.grid.dealias_limit_y();
        self.coeffs.iter().enumerate().all(|(idx, c)| {
            let (m1, m2) = self.grid.freq_at(idx);
            (m1.abs() <= lx && m2.abs() <= ly) || (c.re == 0.0 && c.im == 0.0)
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= a;
        }
        out
    }

    /// Pointwise linear combination `self + a * other`; grids must match.
    pub fn add_scaled(&mut self, a: f64, other: &Self) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }
}

/// Real collocation values on the oversampled grid
/// `(oversample*Mx) x (oversample*My)`, paired with [`SpectralField`] by the
/// transform operations.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let (nx, ny) = grid.collocation_size();
        if values.len() != nx * ny {
            return Err(ZkError::InvalidGrid(format!(
                "expected {} collocation values, got {}",
                nx * ny,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at the collocation points `x_j = 2*pi*j/nx`,
    /// `y_k = 2*pi*k/ny`.
    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: Grid, mut f: F) -> Self {
        let (nx, ny) = grid.collocation_size();
        let mut values = Vec::with_capacity(nx * ny);
        for k in 0..ny {
            let y = std::f64::consts::TAU * k as f64 / ny as f64;
            for j in 0..nx {
                let x = std::f64::consts::TAU * j as f64 / nx as f64;
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Grid maximum of `|f|` over the oversampled collocation points. A lower
    /// bound for the true sup over the torus, converging under refinement.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Mean of `g(value)` times the torus area; spectral-free quadrature used
    /// as an independent check of Parseval-type identities.
    pub fn integral_of<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|&v| g(v)).collect();
        let area = std::f64::consts::TAU * std::f64::consts::TAU;
        area * pairwise_sum(&terms) / terms.len() as f64
    }
}
