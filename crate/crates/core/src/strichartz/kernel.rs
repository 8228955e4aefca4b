//! The oscillatory lattice kernel
//!
//! ```text
//! K_N(x, y, t) = sum_{m in Z^2} cut(m1 + m2/sqrt(3))^2 cut(m1 - m2/sqrt(3))^2
//!                * exp(i (m.x + phi(m) t))
//! ```
//!
//! with `cut` the smooth cutoff at scale `4N` (support `|r| < 8N`). Its sup
//! decays like `|t|^{-2/3}` on the window `N^{-3} <= |t| <= N^{-2}`, the
//! quantitative heart of the short-time Strichartz estimate.

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::pairwise_sum_complex;
use crate::spectral::project::DyadicBlock;
use crate::spectral::propagator::{phi, smooth_cutoff};
use crate::spectral::transform::fft2_inplace;
use crate::{Result, ZkError};

/// A kernel evaluation request: dyadic scale, time, and the image count for
/// the Poisson-summed representation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelProbe {
    pub n: u32,
    pub t: f64,
    pub truncation: u32,
}

impl KernelProbe {
    pub fn new(block: DyadicBlock, t: f64, truncation: u32) -> Result<Self> {
        if block.value() < 1 {
            return Err(ZkError::InvalidParameter(
                "kernel probes need N >= 1".into(),
            ));
        }
        if truncation < 4 {
            return Err(ZkError::InvalidParameter(format!(
                "Poisson truncation must be at least 4, got {truncation}"
            )));
        }
        if !t.is_finite() {
            return Err(ZkError::NonFinite("kernel probe time"));
        }
        Ok(Self {
            n: block.value(),
            t,
            truncation,
        })
    }

    /// True when `t` lies in the decay window `[N^{-3}, N^{-2}]`.
    pub fn in_decay_regime(&self) -> bool {
        let n = self.n as f64;
        let at = self.t.abs();
        n.powi(-3) <= at && at <= n.powi(-2)
    }

    /// Squared cutoff pair weight of lattice point `(m1, m2)`.
    fn weight(&self, m1: i64, m2: i64) -> f64 {
        let scale = 4.0 * self.n as f64;
        let r3 = 3f64.sqrt();
        let a1 = m1 as f64 + m2 as f64 / r3;
        let a2 = m1 as f64 - m2 as f64 / r3;
        let c1 = smooth_cutoff(a1, scale);
        if c1 == 0.0 {
            return 0.0;
        }
        let c2 = smooth_cutoff(a2, scale);
        c1 * c1 * c2 * c2
    }

    fn lattice_bounds(&self) -> (i64, i64) {
        let n = self.n as i64;
        (8 * n, ((8 * n) as f64 * 3f64.sqrt()).ceil() as i64)
    }
}

/// Exact finite lattice sum at a single point (deterministic pairwise
/// reduction).
pub fn kernel_direct(probe: &KernelProbe, x: f64, y: f64) -> Complex64 {
    let (bx, by) = probe.lattice_bounds();
    let mut terms = Vec::new();
    for m1 in -bx..=bx {
        for m2 in -by..=by {
            let w = probe.weight(m1, m2);
            if w == 0.0 {
                continue;
            }
            let angle = m1 as f64 * x + m2 as f64 * y + phi(m1, m2) * probe.t;
            terms.push(w * Complex64::new(angle.cos(), angle.sin()));
        }
    }
    pairwise_sum_complex(&terms)
}

/// The same lattice sum evaluated at every point of the uniform
/// `n_grid x n_grid` collocation grid at once: terms are binned modulo the
/// grid and resummed by one inverse FFT, which reproduces the pointwise sum
/// exactly (`exp(i m1 x_j)` depends only on `m1 mod n_grid`).
pub fn kernel_direct_grid(probe: &KernelProbe, n_grid: usize) -> Vec<Complex64> {
    let (bx, by) = probe.lattice_bounds();
    let mut bins = vec![Complex64::new(0.0, 0.0); n_grid * n_grid];
    let ng = n_grid as i64;
    for m1 in -bx..=bx {
        for m2 in -by..=by {
            let w = probe.weight(m1, m2);
            if w == 0.0 {
                continue;
            }
            let angle = phi(m1, m2) * probe.t;
            let ix = m1.rem_euclid(ng) as usize;
            let iy = m2.rem_euclid(ng) as usize;
            bins[iy * n_grid + ix] += w * Complex64::new(angle.cos(), angle.sin());
        }
    }
    fft2_inplace(&mut bins, n_grid, n_grid, false);
    bins
}

/// `sup |K_N|` over the uniform grid.
pub fn kernel_sup_on_grid(probe: &KernelProbe, n_grid: usize) -> f64 {
    kernel_direct_grid(probe, n_grid)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelDecayRow {
    pub n: u32,
    pub t: f64,
    /// `sup |K_N|` over the evaluation grid.
    pub value: f64,
    /// `value * t^{2/3}` — constant along the decay law.
    pub bound_constant: f64,
}

/// Scans `sup |K_N|` over log-spaced times in `[N^{-3}, N^{-2}]`.
pub fn kernel_decay_scan(
    block: DyadicBlock,
    t_points: usize,
    n_grid: usize,
) -> Result<Vec<KernelDecayRow>> {
    if t_points < 2 {
        return Err(ZkError::NotEnoughData {
            need: 2,
            got: t_points,
        });
    }
    let n = block.value();
    let nf = n as f64;
    let (t0, t1) = (nf.powi(-3), nf.powi(-2));
    let mut rows = Vec::with_capacity(t_points);
    for i in 0..t_points {
        let frac = i as f64 / (t_points - 1) as f64;
        let t = t0 * (t1 / t0).powf(frac);
        let probe = KernelProbe::new(block, t, 8)?;
        let value = kernel_sup_on_grid(&probe, n_grid);
        rows.push(KernelDecayRow {
            n,
            t,
            value,
            bound_constant: value * t.powf(2.0 / 3.0),
        });
    }
    Ok(rows)
}
