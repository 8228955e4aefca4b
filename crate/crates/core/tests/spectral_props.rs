//! Structural properties of the spectral layer: the dyadic/smooth norm
//! equivalence and alias-free products under the 2/3 rule.

use num_complex::Complex64;
use rand::prelude::*;
use zk_core::spectral::project::{lp_project, DyadicBlock};
use zk_core::spectral::transform::{analyze, synthesize};
use zk_core::{Grid, RealField, SobolevIndex, SpectralField};

fn random_field(seed: u64, grid: Grid) -> SpectralField {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    for c in f.coeffs_mut() {
        *c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    f
}

#[test]
fn dyadic_norm_equivalence_with_constant_4_pow_s() {
    // (1/C) sum (1 v N)^{2s} ||P_N f||^2 <= ||f||_{H^s}^2 <= C * sum ...
    // with C = 4^{|s|}: on the integer lattice 1 + |m|^2 <= 4 N^2 on the
    // shell [N, 2N), and 1 + |m|^2 > N^2, which pins the constant.
    let grid = Grid::new(64, 64).unwrap();
    let blocks = DyadicBlock::covering(32, 32);
    for (seed, s) in [(1u64, -1.3), (2, 0.5), (3, 1.0), (4, 2.0)] {
        let f = random_field(seed, grid);
        let si = SobolevIndex::new(s).unwrap();
        let hs2 = f.sobolev_norm(si).powi(2);
        let dyadic: f64 = blocks
            .iter()
            .map(|&b| {
                let weight = (b.one_vee() as f64).powf(2.0 * s);
                weight * lp_project(&f, b).l2_norm().powi(2)
            })
            .sum();
        let c = 4f64.powf(s.abs());
        assert!(dyadic / c <= hs2 * (1.0 + 1e-12), "s={s}: lower");
        assert!(hs2 <= c * dyadic * (1.0 + 1e-12), "s={s}: upper");
    }
}

#[test]
fn dealiased_product_matches_exact_convolution() {
    // the collocation product of two dealiased fields, re-analyzed and
    // restricted to the retained band, carries no aliasing error
    let grid = Grid::new(16, 16).unwrap();
    let a = {
        let mut f = random_field(11, grid);
        f.symmetrize();
        f.dealias_in_place();
        f
    };
    let b = {
        let mut f = random_field(12, grid);
        f.symmetrize();
        f.dealias_in_place();
        f
    };
    // grid product through the real-value pipeline
    let av = synthesize(&a).unwrap();
    let bv = synthesize(&b).unwrap();
    let prod_values: Vec<f64> = av
        .values()
        .iter()
        .zip(bv.values())
        .map(|(x, y)| x * y)
        .collect();
    let prod = analyze(&RealField::from_values(grid, prod_values).unwrap())
        .unwrap()
        .dealiased();
    // exact convolution oracle
    for idx in 0..grid.mode_count() {
        let (k1, k2) = grid.freq_at(idx);
        if k1.abs() > grid.dealias_limit_x() || k2.abs() > grid.dealias_limit_y() {
            continue;
        }
        let mut conv = Complex64::new(0.0, 0.0);
        for jdx in 0..grid.mode_count() {
            let (a1, a2) = grid.freq_at(jdx);
            conv += a.coeffs()[jdx] * b.get(k1 - a1, k2 - a2);
        }
        assert!(
            (prod.coeffs()[idx] - conv).norm() <= 1e-13,
            "mode ({k1},{k2})"
        );
    }
}

#[test]
fn field_supported_in_band_is_unchanged_by_dealias() {
    let grid = Grid::new(32, 32).unwrap();
    let mut f = random_field(21, grid);
    f.dealias_in_place();
    let again = f.dealiased();
    assert_eq!(f, again);
}
