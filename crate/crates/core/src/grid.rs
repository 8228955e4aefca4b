//! Truncated Fourier lattice on the 2-torus.

use serde::{Deserialize, Serialize};

use crate::{Result, ZkError};

/// Discretization of `T^2`: `Mx x My` retained Fourier modes plus a
/// collocation refinement factor used when evaluating sup norms.
///
/// Retained x-frequencies are `m1 in [-Mx/2, Mx/2)` in standard FFT order
/// (likewise for y). Collocation points are `x_j = 2*pi*j/(oversample*Mx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    mx: usize,
    my: usize,
    oversample: usize,
}

fn is_pow2(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

impl Grid {
    /// Grid with the default 4x oversampling for sup-norm evaluation.
    pub fn new(mx: usize, my: usize) -> Result<Self> {
        Self::with_oversample(mx, my, 4)
    }

    pub fn with_oversample(mx: usize, my: usize, oversample: usize) -> Result<Self> {
        if !is_pow2(mx) || !is_pow2(my) || mx < 8 || my < 8 {
            return Err(ZkError::InvalidGrid(format!(
                "Mx, My must be powers of two >= 8, got {mx}x{my}"
            )));
        }
        if oversample == 0 || !is_pow2(oversample) {
            return Err(ZkError::InvalidGrid(format!(
                "oversample must be a positive power of two, got {oversample}"
            )));
        }
        Ok(Self { mx, my, oversample })
    }

    pub fn mx(&self) -> usize {
        self.mx
    }

    pub fn my(&self) -> usize {
        self.my
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    /// Number of retained lattice points.
    pub fn mode_count(&self) -> usize {
        self.mx * self.my
    }

    /// Collocation size `(oversample*Mx, oversample*My)`.
    pub fn collocation_size(&self) -> (usize, usize) {
        (self.oversample * self.mx, self.oversample * self.my)
    }

    /// Largest x-frequency kept by the 2/3 dealiasing rule.
    pub fn dealias_limit_x(&self) -> i64 {
        (self.mx / 3) as i64
    }

    pub fn dealias_limit_y(&self) -> i64 {
        (self.my / 3) as i64
    }

    /// True if the signed frequency pair is on the retained lattice.
    pub fn contains(&self, m1: i64, m2: i64) -> bool {
        let hx = (self.mx / 2) as i64;
        let hy = (self.my / 2) as i64;
        (-hx..hx).contains(&m1) && (-hy..hy).contains(&m2)
    }

    /// Flat index of frequency `(m1, m2)` in FFT storage order
    /// (x fastest, negative frequencies wrapped).
    pub fn index_of(&self, m1: i64, m2: i64) -> Option<usize> {
        if !self.contains(m1, m2) {
            return None;
        }
        let ix = m1.rem_euclid(self.mx as i64) as usize;
        let iy = m2.rem_euclid(self.my as i64) as usize;
        Some(iy * self.mx + ix)
    }

    /// Signed frequency pair stored at flat index `idx`.
    pub fn freq_at(&self, idx: usize) -> (i64, i64) {
        let ix = (idx % self.mx) as i64;
        let iy = (idx / self.mx) as i64;
        (
            signed_freq(ix, self.mx as i64),
            signed_freq(iy, self.my as i64),
        )
    }

    /// Iterator over all retained signed frequencies, in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.mode_count()).map(|idx| self.freq_at(idx))
    }
}

fn signed_freq(i: i64, n: i64) -> i64 {
    if i < n / 2 {
        i
    } else {
        i - n
    }
}
