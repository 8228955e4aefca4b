//! FFT transforms between spectral and collocation representations.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;
use crate::spectral::field::{RealField, SpectralField};
use crate::{Result, ZkError};

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((len, forward))
            .or_insert_with(|| {
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// In-place 2D FFT of row-major `data` (`nx` fastest). Forward uses the
/// `exp(-i 2 pi j k / n)` kernel, inverse the conjugate; neither scales.
pub(crate) fn fft2_inplace(data: &mut [Complex64], nx: usize, ny: usize, forward: bool) {
    debug_assert_eq!(data.len(), nx * ny);
    let fx = plan(nx, forward);
    for row in data.chunks_exact_mut(nx) {
        fx.process(row);
    }
    let fy = plan(ny, forward);
    let mut col = vec![Complex64::new(0.0, 0.0); ny];
    for ix in 0..nx {
        for iy in 0..ny {
            col[iy] = data[iy * nx + ix];
        }
        fy.process(&mut col);
        for iy in 0..ny {
            data[iy * nx + ix] = col[iy];
        }
    }
}

/// Evaluates `sum_m c_m exp(i m.x)` on the `pad*Mx x pad*My` collocation grid
/// by zero-padded inverse FFT. Exact for band-limited fields.
pub(crate) fn synthesize_complex_padded(field: &SpectralField, pad: usize) -> Vec<Complex64> {
    let grid = field.grid();
    let nx = pad * grid.mx();
    let ny = pad * grid.my();
    let mut data = vec![Complex64::new(0.0, 0.0); nx * ny];
    for (idx, &c) in field.coeffs().iter().enumerate() {
        let (m1, m2) = grid.freq_at(idx);
        let ix = m1.rem_euclid(nx as i64) as usize;
        let iy = m2.rem_euclid(ny as i64) as usize;
        data[iy * nx + ix] = c;
    }
    fft2_inplace(&mut data, nx, ny, false);
    data
}

/// Extracts the retained lattice from forward-FFT output of a `pad`-times
/// oversampled value grid (includes the `1/(nx*ny)` normalization).
pub(crate) fn analyze_complex_padded(
    grid: Grid,
    data: &mut [Complex64],
    pad: usize,
) -> SpectralField {
    let nx = pad * grid.mx();
    let ny = pad * grid.my();
    fft2_inplace(data, nx, ny, true);
    let scale = 1.0 / (nx * ny) as f64;
    let mut field = SpectralField::zeros(grid);
    for idx in 0..grid.mode_count() {
        let (m1, m2) = grid.freq_at(idx);
        let ix = m1.rem_euclid(nx as i64) as usize;
        let iy = m2.rem_euclid(ny as i64) as usize;
        field.coeffs_mut()[idx] = data[iy * nx + ix] * scale;
    }
    field
}

/// Fourier analysis of collocation values. Exact on trigonometric
/// polynomials resolvable by the grid.
pub fn analyze(f: &RealField) -> Result<SpectralField> {
    if !f.is_finite() {
        return Err(ZkError::NonFinite("analyze input values"));
    }
    let grid = f.grid();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(analyze_complex_padded(grid, &mut data, grid.oversample()))
}

/// Hermitian-symmetry tolerance for requesting real output.
pub const REAL_SYMMETRY_TOL: f64 = 1e-12;

/// Evaluates the field at the oversampled collocation points as a real
/// field. Fails if the coefficients are not Hermitian-symmetric to
/// [`REAL_SYMMETRY_TOL`] (relative).
pub fn synthesize(field: &SpectralField) -> Result<RealField> {
    let scale = field.max_coeff_abs().max(f64::MIN_POSITIVE);
    let defect = field.hermitian_defect();
    if defect > REAL_SYMMETRY_TOL * scale {
        return Err(ZkError::SymmetryViolation {
            defect: defect / scale,
            tol: REAL_SYMMETRY_TOL,
        });
    }
    let grid = field.grid();
    let data = synthesize_complex_padded(field, grid.oversample());
    let values: Vec<f64> = data.iter().map(|c| c.re).collect();
    RealField::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;

    fn grid() -> Grid {
        Grid::new(16, 16).unwrap()
    }

    #[test]
    fn analyze_constant() {
        let one = RealField::from_fn(grid(), |_, _| 1.0);
        let f = analyze(&one).unwrap();
        assert!((f.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let energy: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!((energy - 1.0).abs() < 1e-13);
    }

    #[test]
    fn analyze_cos_2y() {
        let v = RealField::from_fn(grid(), |_, y| (2.0 * y).cos());
        let f = analyze(&v).unwrap();
        assert!((f.get(0, 2) - Complex64::new(0.5, 0.0)).norm() < 1e-13);
        assert!((f.get(0, -2) - Complex64::new(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn synthesize_cos_x() {
        let half = Complex64::new(0.5, 0.0);
        let f = SpectralField::from_modes(grid(), &[((1, 0), half), ((-1, 0), half)]).unwrap();
        let v = synthesize(&f).unwrap();
        let (nx, _) = grid().collocation_size();
        for (i, &val) in v.values().iter().enumerate() {
            let x = std::f64::consts::TAU * (i % nx) as f64 / nx as f64;
            assert!((val - x.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn synthesize_zero() {
        let f = SpectralField::zeros(grid());
        let v = synthesize(&f).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn synthesize_rejects_asymmetric() {
        let mut f = SpectralField::zeros(grid());
        f.set(1, 1, Complex64::new(1.0, 1.0)).unwrap();
        assert!(matches!(
            synthesize(&f),
            Err(ZkError::SymmetryViolation { .. })
        ));
    }

    fn random_band_limited(rng: &mut impl Rng, g: Grid) -> SpectralField {
        // random real field supported in the dealias band
        let mut f = SpectralField::zeros(g);
        for idx in 0..g.mode_count() {
            let (m1, m2) = g.freq_at(idx);
            if m1.abs() <= g.dealias_limit_x() && m2.abs() <= g.dealias_limit_y() {
                f.coeffs_mut()[idx] =
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        f.symmetrize();
        f
    }

    #[test]
    fn roundtrip_random_band_limited() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let f = random_band_limited(&mut rng, grid());
            let back = analyze(&synthesize(&f).unwrap()).unwrap();
            let scale = f.max_coeff_abs();
            for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn synthesize_matches_direct_summation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let g = grid();
        let f = random_band_limited(&mut rng, g);
        let v = synthesize(&f).unwrap();
        let (nx, ny) = g.collocation_size();
        for _ in 0..10 {
            let j = rng.random_range(0..nx);
            let k = rng.random_range(0..ny);
            let x = std::f64::consts::TAU * j as f64 / nx as f64;
            let y = std::f64::consts::TAU * k as f64 / ny as f64;
            let mut direct = Complex64::new(0.0, 0.0);
            for idx in 0..g.mode_count() {
                let (m1, m2) = g.freq_at(idx);
                let phase = m1 as f64 * x + m2 as f64 * y;
                direct += f.coeffs()[idx] * Complex64::new(phase.cos(), phase.sin());
            }
            assert!((direct.re - v.values()[k * nx + j]).abs() < 1e-10);
        }
    }

    #[test]
    fn parseval_via_quadrature() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        let f = random_band_limited(&mut rng, grid());
        let v = synthesize(&f).unwrap();
        let l2_quadrature = v.integral_of(|x| x * x).sqrt();
        let l2_spectral = f.l2_norm();
        assert!((l2_quadrature - l2_spectral).abs() <= 1e-12 * l2_spectral);
    }

    #[test]
    fn sup_norm_examples() {
        let g = grid();
        let sin_x = RealField::from_fn(g, |x, _| x.sin());
        assert!((sin_x.sup_norm() - 1.0).abs() < 1e-6);
        let c = RealField::from_fn(g, |_, _| -2.5);
        assert_eq!(c.sup_norm(), 2.5);
    }

    #[test]
    fn sup_norm_refinement_monotone() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let g4 = Grid::with_oversample(16, 16, 4).unwrap();
        let g8 = Grid::with_oversample(16, 16, 8).unwrap();
        let f4 = random_band_limited(&mut rng, g4);
        let mut f8 = SpectralField::zeros(g8);
        for idx in 0..g4.mode_count() {
            let (m1, m2) = g4.freq_at(idx);
            f8.set(m1, m2, f4.coeffs()[idx]).unwrap();
        }
        let s4 = synthesize(&f4).unwrap().sup_norm();
        let s8 = synthesize(&f8).unwrap().sup_norm();
        assert!(s8 >= s4 - 1e-8);
    }
}
