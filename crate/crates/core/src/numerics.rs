//! Small shared numerics: deterministic reductions, quadrature, line fits.

use num_complex::Complex64;

use crate::{Result, ZkError};

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// accurate to `O(log n)` rounding, which the reproducibility contract of the
/// experiment outputs relies on.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
        }
    }
}

/// Trapezoidal quadrature over sample points `(t_i, f_i)`; `t` must be
/// strictly increasing.
pub fn trapezoid(ts: &[f64], fs: &[f64]) -> Result<f64> {
    if ts.len() != fs.len() || ts.len() < 2 {
        return Err(ZkError::NotEnoughData {
            need: 2,
            got: ts.len().min(fs.len()),
        });
    }
    let mut terms = Vec::with_capacity(ts.len() - 1);
    for i in 1..ts.len() {
        let dt = ts[i] - ts[i - 1];
        if dt <= 0.0 {
            return Err(ZkError::InvalidParameter(
                "trapezoid: sample times must be strictly increasing".into(),
            ));
        }
        terms.push(0.5 * dt * (fs[i] + fs[i - 1]));
    }
    Ok(pairwise_sum(&terms))
}

/// Least-squares line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub rms_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(ZkError::NotEnoughData {
            need: 2,
            got: xs.len().min(ys.len()),
        });
    }
    let n = xs.len() as f64;
    let sx = pairwise_sum(xs);
    let sy = pairwise_sum(ys);
    let sxx: f64 = pairwise_sum(&xs.iter().map(|x| x * x).collect::<Vec<_>>());
    let sxy: f64 = pairwise_sum(&xs.iter().zip(ys).map(|(x, y)| x * y).collect::<Vec<_>>());
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(ZkError::InvalidParameter(
            "fit_line: degenerate abscissae".into(),
        ));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

/// Fit `log y = intercept + slope * log x`; all data must be positive.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().any(|&x| x <= 0.0) || ys.iter().any(|&y| y <= 0.0) {
        return Err(ZkError::InvalidParameter(
            "fit_loglog: data must be positive".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly)
}

/// Integer square root of `n` (floor), exact for all `u128`.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // float seed can be off by a few ulps near 2^53; settle by Newton steps
    loop {
        let next = (x + n / x) / 2;
        if next >= x {
            break;
        }
        x = next;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    while x * x > n {
        x -= 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let ts: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let fs: Vec<f64> = ts.iter().map(|t| 3.0 * t + 1.0).collect();
        let q = trapezoid(&ts, &fs).unwrap();
        assert!((q - 2.5).abs() < 1e-14);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 2.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn isqrt_edges() {
        for n in 0u128..2000 {
            let r = isqrt_u128(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n={n}");
        }
        let big = (1u128 << 100) + 12345;
        let r = isqrt_u128(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }
}
