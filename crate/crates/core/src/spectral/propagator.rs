//! Linear propagator `W(t)` and the smooth frequency cutoff.

use num_complex::Complex64;

use crate::spectral::field::SpectralField;
use crate::{Result, ZkError};

/// Inputs to the dispersion symbol and the resonance function are guarded to
/// this magnitude so all integer arithmetic stays exact in `i128`.
pub const INTEGER_GUARD: i64 = 200_000;

/// Dispersion symbol `phi(m, n) = m^3 + m n^2`, exact in wide integers.
pub fn dispersion_symbol(m: i64, n: i64) -> Result<i128> {
    if m.abs() > INTEGER_GUARD {
        return Err(ZkError::IntegerOverflow(m, "m"));
    }
    if n.abs() > INTEGER_GUARD {
        return Err(ZkError::IntegerOverflow(n, "n"));
    }
    let m = m as i128;
    let n = n as i128;
    Ok(m * m * m + m * n * n)
}

/// `phi(m, n)` as f64 for frequencies on a retained lattice (exact there:
/// lattice symbols are far below 2^53).
pub fn phi(m1: i64, m2: i64) -> f64 {
    (m1 * m1 * m1 + m1 * m2 * m2) as f64
}

/// Applies the unitary group `W(t)`: multiplies each coefficient by
/// `exp(i phi(m) t)`. Preserves every `H^s` norm and satisfies the group law
/// `W(t) W(t') = W(t + t')`.
pub fn propagate(field: &SpectralField, t: f64) -> SpectralField {
    let mut out = field.clone();
    out.apply_multiplier(|m1, m2| {
        let angle = phi(m1, m2) * t;
        Complex64::new(angle.cos(), angle.sin())
    });
    out
}

/// The concrete bump underlying all smooth cutoffs: `psi(x) = exp(-1/x)` for
/// `x > 0`, else 0; `cut(r) = 1` on `|r| <= 1`, 0 on `|r| >= 2`, and the
/// standard smooth partition ratio in between.
fn bump_psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff `phi(r/N)` at scale `N >= 1` (any positive real scale is
/// accepted; the kernel machinery uses `4N`).
pub fn smooth_cutoff(r: f64, scale: f64) -> f64 {
    debug_assert!(scale >= 1.0);
    let a = (r / scale).abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let up = bump_psi(2.0 - a);
        up / (up + bump_psi(a - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::spectral::field::SobolevIndex;
    use rand::prelude::*;

    #[test]
    fn symbol_values() {
        assert_eq!(dispersion_symbol(1, 0).unwrap(), 1);
        assert_eq!(dispersion_symbol(2, 3).unwrap(), 26);
        assert_eq!(dispersion_symbol(0, 5).unwrap(), 0);
        assert!(dispersion_symbol(200_001, 0).is_err());
        assert!(dispersion_symbol(2, -200_001).is_err());
    }

    #[test]
    fn symbol_even_in_n() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = rng.random_range(-1000..=1000);
            let n = rng.random_range(-1000..=1000);
            assert_eq!(
                dispersion_symbol(m, n).unwrap(),
                dispersion_symbol(m, -n).unwrap()
            );
        }
    }

    #[test]
    fn propagate_identity_at_zero() {
        let g = Grid::new(16, 16).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(3, -2, Complex64::new(0.3, 0.4)).unwrap();
        assert_eq!(propagate(&f, 0.0), f);
    }

    #[test]
    fn zero_x_frequency_is_fixed() {
        let g = Grid::new(16, 16).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(0, 3, Complex64::new(1.0, -2.0)).unwrap();
        let p = propagate(&f, 17.3);
        assert_eq!(p.get(0, 3), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn mode_11_phase_advance() {
        // phi(1,1) = 2, so the phase advances by exp(2 i t)
        let g = Grid::new(16, 16).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 1, Complex64::new(1.0, 0.0)).unwrap();
        let t = 0.37;
        let p = propagate(&f, t);
        let expect = Complex64::new((2.0 * t).cos(), (2.0 * t).sin());
        assert!((p.get(1, 1) - expect).norm() < 1e-15);
    }

    #[test]
    fn unitarity_group_law_random() {
        let g = Grid::new(64, 64).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let mut f = SpectralField::zeros(g);
            for c in f.coeffs_mut() {
                *c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            let t: f64 = rng.random_range(-10.0..10.0);
            let t2: f64 = rng.random_range(-10.0..10.0);
            for s in [0.0, 1.0, 2.0] {
                let si = SobolevIndex::new(s).unwrap();
                let a = f.sobolev_norm(si);
                let b = propagate(&f, t).sobolev_norm(si);
                assert!((a - b).abs() <= 1e-12 * a);
            }
            // group law: composed phases phi*t + phi*t2 differ from
            // phi*(t+t2) by rounding of order |phi*t|*eps, so the bound
            // scales with the largest phase on the grid
            let ab = propagate(&propagate(&f, t), t2);
            let a_plus_b = propagate(&f, t + t2);
            let diff = ab.sub(&a_plus_b).max_coeff_abs();
            let max_phase = phi(32, 32).abs() * (t.abs() + t2.abs());
            assert!(diff <= 4.0 * f64::EPSILON * max_phase * f.max_coeff_abs());
            // inverse
            let back = propagate(&propagate(&f, t), -t);
            assert!(back.sub(&f).max_coeff_abs() <= 1e-12 * f.max_coeff_abs());
        }
    }

    #[test]
    fn cutoff_plateau_support_symmetry() {
        for n in [1.0, 4.0, 32.0] {
            assert_eq!(smooth_cutoff(0.5 * n, n), 1.0);
            assert_eq!(smooth_cutoff(-n, n), 1.0);
            assert_eq!(smooth_cutoff(2.0 * n, n), 0.0);
            assert_eq!(smooth_cutoff(-2.5 * n, n), 0.0);
            let mid = smooth_cutoff(1.5 * n, n);
            assert!(mid > 0.0 && mid < 1.0);
            assert_eq!(mid, smooth_cutoff(-1.5 * n, n));
        }
        // monotone on the transition
        let mut prev = 1.0;
        for i in 0..=100 {
            let r = 1.0 + i as f64 / 100.0;
            let v = smooth_cutoff(r, 1.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}
