//! Exact integer arithmetic for the resonance function of triadic wave
//! interactions, enumeration of its zero set, and the curvature identity.
//!
//! The resonance function measures the time-frequency mismatch of the
//! interaction `(m, n) -> (m - m1, n - n1) + (m1, n1)`:
//!
//! ```text
//! R(m, m1, n, n1) = phi(m, n) - phi(m - m1, n - n1) - phi(m1, n1)
//!                 = 3 m m1 (m - m1) + 2 n n1 (m - m1) + m1 n^2 - m n1^2
//! ```
//!
//! Zeros of `R` drive the strongest nonlinear interactions; the family
//! `R(m, 0, n, 2n) = 0` (zero x-frequency) is the one exploited by the
//! approximate solutions, and `R(m, 0, -1, 2) = R(m, 0, 1, -2) = -8m` is the
//! curvature identity making the counterterm both small and resonance-safe.

use crate::numerics::isqrt_u128;
use crate::spectral::propagator::{dispersion_symbol, INTEGER_GUARD};
use crate::{Result, ZkError};

/// An integer quadruple with its exact resonance value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResonanceQuadruple {
    pub m: i64,
    pub m1: i64,
    pub n: i64,
    pub n1: i64,
    pub value: i128,
}

fn guard(v: i64, name: &'static str) -> Result<i128> {
    if v.abs() > INTEGER_GUARD {
        return Err(ZkError::IntegerOverflow(v, name));
    }
    Ok(v as i128)
}

/// Exact resonance value in the expanded polynomial form.
pub fn resonance(m: i64, m1: i64, n: i64, n1: i64) -> Result<i128> {
    let (m, m1, n, n1) = (
        guard(m, "m")?,
        guard(m1, "m1")?,
        guard(n, "n")?,
        guard(n1, "n1")?,
    );
    Ok(3 * m * m1 * (m - m1) + 2 * n * n1 * (m - m1) + m1 * n * n - m * n1 * n1)
}

/// Resonance value in the definitional difference form
/// `phi(m, n) - phi(m - m1, n - n1) - phi(m1, n1)`; agrees exactly with
/// [`resonance`] and serves as its independent oracle.
pub fn resonance_definitional(m: i64, m1: i64, n: i64, n1: i64) -> Result<i128> {
    Ok(dispersion_symbol(m, n)? - dispersion_symbol(m - m1, n - n1)? - dispersion_symbol(m1, n1)?)
}

/// The curvature pair `(R(m, 0, -1, 2), R(m, 0, 1, -2))`; both equal `-8m`.
pub fn curvature(m: i64) -> Result<(i128, i128)> {
    Ok((resonance(m, 0, -1, 2)?, resonance(m, 0, 1, -2)?))
}

/// Real-argument extension of `R` evaluated on the family
/// `(m, m1, sqrt(3) m, -sqrt(3) m1)`, which vanishes identically (up to
/// floating-point error).
pub fn sqrt3_family_value(m: i64, m1: i64) -> f64 {
    resonance_real(
        m as f64,
        m1 as f64,
        3f64.sqrt() * m as f64,
        -(3f64.sqrt()) * m1 as f64,
    )
}

/// Expanded resonance polynomial over the reals.
pub fn resonance_real(m: f64, m1: f64, n: f64, n1: f64) -> f64 {
    3.0 * m * m1 * (m - m1) + 2.0 * n * n1 * (m - m1) + m1 * n * n - m * n1 * n1
}

/// All quadruples with `max(|m|, |m1|, |n|, |n1|) <= bound` and `R = 0`,
/// deduplicated and sorted lexicographically.
///
/// For fixed `(m, m1, n)` the equation is a quadratic in `n1` (solved by
/// exact integer square root) except in the degenerate `m = 0` case, where
/// the closed form `R = m1 n (n - 2 n1)` enumerates zeros directly.
pub fn enumerate_resonances(bound: u32) -> Result<Vec<ResonanceQuadruple>> {
    if bound == 0 || bound > 200 {
        return Err(ZkError::InvalidParameter(format!(
            "enumeration bound must be in 1..=200, got {bound}"
        )));
    }
    let b = bound as i64;
    let mut out = Vec::new();
    let mut push = |m: i64, m1: i64, n: i64, n1: i64| {
        if n1.abs() <= b {
            debug_assert_eq!(resonance(m, m1, n, n1).unwrap(), 0);
            out.push(ResonanceQuadruple {
                m,
                m1,
                n,
                n1,
                value: 0,
            });
        }
    };
    for m in -b..=b {
        for m1 in -b..=b {
            for n in -b..=b {
                if m == 0 {
                    // R = m1 * n * (n - 2 n1)
                    if m1 == 0 || n == 0 {
                        for n1 in -b..=b {
                            push(m, m1, n, n1);
                        }
                    } else if n % 2 == 0 {
                        push(m, m1, n, n / 2);
                    }
                    continue;
                }
                // R = a n1^2 + p n1 + q with a = -m
                let a = -(m as i128);
                let p = 2 * (n as i128) * ((m - m1) as i128);
                let q = (m1 as i128) * ((3 * m * (m - m1)) as i128 + (n as i128) * n as i128);
                let disc = p * p - 4 * a * q;
                if disc < 0 {
                    continue;
                }
                let root = isqrt_u128(disc as u128) as i128;
                if root * root != disc {
                    continue;
                }
                for r in [root, -root] {
                    let num = -p + r;
                    if num % (2 * a) == 0 {
                        push(m, m1, n, (num / (2 * a)) as i64);
                    }
                    if r == 0 {
                        break;
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Plain four-fold loop over the box; the enumeration oracle for small
/// bounds (test use).
pub fn enumerate_resonances_brute(bound: u32) -> Result<Vec<ResonanceQuadruple>> {
    let b = bound as i64;
    let mut out = Vec::new();
    for m in -b..=b {
        for m1 in -b..=b {
            for n in -b..=b {
                for n1 in -b..=b {
                    if resonance(m, m1, n, n1)? == 0 {
                        out.push(ResonanceQuadruple {
                            m,
                            m1,
                            n,
                            n1,
                            value: 0,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// CSV rows (header `m,m1,n,n1,value`) for a quadruple list.
pub fn quadruples_to_csv(quads: &[ResonanceQuadruple]) -> String {
    let mut s = String::from("m,m1,n,n1,value\r\n");
    for q in quads {
        s.push_str(&format!(
            "{},{},{},{},{}\r\n",
            q.m, q.m1, q.n, q.n1, q.value
        ));
    }
    s
}
