//! C ABI for the Zakharov-Kuznetsov 2-torus toolkit.
//!
//! Conventions:
//! - Every fallible function returns a [`ZkStatus`] and writes results
//!   through out-pointers; `ZK_STATUS_OK` (0) signals success.
//! - Spectral fields are opaque [`ZkField`] handles created by
//!   `zk_field_approx` and released with `zk_field_free`.
//! - No function stores the pointers it receives.
//!
//! The matching header `include/zk_capi.h` is generated by cbindgen at
//! build time.

use std::ffi::{c_char, CStr};

use zk_core::approx::{build, ApproxSolutionParams};
use zk_core::resonance;
use zk_core::solver::{observers_to_csv, solve, step, SolverConfig};
use zk_core::spectral::propagator::dispersion_symbol;
use zk_core::spectral::{propagate, SpectralField};
use zk_core::{Grid, SobolevIndex, ZkError};

/// Outcome of a C-API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Overflow = 3,
    GridTooSmall = 4,
    SolveFailed = 5,
    IoError = 6,
}

fn status_of(err: &ZkError) -> ZkStatus {
    match err {
        ZkError::IntegerOverflow(..) => ZkStatus::Overflow,
        ZkError::GridTooSmall { .. } => ZkStatus::GridTooSmall,
        ZkError::BlowUp { .. } | ZkError::StabilityViolation { .. } => ZkStatus::SolveFailed,
        ZkError::Io(..) => ZkStatus::IoError,
        _ => ZkStatus::InvalidArgument,
    }
}

/// Opaque handle to a spectral field on the 2-torus.
pub struct ZkField {
    inner: SpectralField,
}

/// An integer resonance quadruple `(m, m1, n, n1)` with `R = 0`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZkQuadruple {
    pub m: i64,
    pub m1: i64,
    pub n: i64,
    pub n1: i64,
}

/// Library version as a NUL-terminated static string; never freed by the
/// caller.
#[no_mangle]
pub extern "C" fn zk_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Dispersion symbol `phi(m, n) = m^3 + m n^2`, exact for `|m|, |n| <= 2e5`.
///
/// # Safety
/// `out` must point to writable memory for one `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn zk_dispersion_symbol(m: i64, n: i64, out: *mut i64) -> ZkStatus {
    if out.is_null() {
        return ZkStatus::NullPointer;
    }
    match dispersion_symbol(m, n) {
        Ok(v) => {
            *out = v as i64;
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Resonance function `R(m, m1, n, n1)`, exact for inputs up to `2e5` in
/// magnitude (the value then fits `int64_t`).
///
/// # Safety
/// `out` must point to writable memory for one `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn zk_resonance(m: i64, m1: i64, n: i64, n1: i64, out: *mut i64) -> ZkStatus {
    if out.is_null() {
        return ZkStatus::NullPointer;
    }
    match resonance::resonance(m, m1, n, n1) {
        Ok(v) => {
            *out = v as i64;
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// The curvature pair `R(m, 0, -1, 2)` and `R(m, 0, 1, -2)`; both equal
/// `-8 m`.
///
/// # Safety
/// `out_a` and `out_b` must each point to writable memory for one
/// `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn zk_curvature(m: i64, out_a: *mut i64, out_b: *mut i64) -> ZkStatus {
    if out_a.is_null() || out_b.is_null() {
        return ZkStatus::NullPointer;
    }
    match resonance::curvature(m) {
        Ok((a, b)) => {
            *out_a = a as i64;
            *out_b = b as i64;
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Enumerates all resonance zeros with `max(|m|,|m1|,|n|,|n1|) <= bound`
/// (sorted lexicographically). Two-call protocol: pass `quads = NULL` to
/// query the count via `out_len`, then call again with a buffer of that
/// capacity.
///
/// # Safety
/// `out_len` must be a valid pointer; when `quads` is non-NULL it must
/// point to at least `capacity` writable `ZkQuadruple`s.
#[no_mangle]
pub unsafe extern "C" fn zk_resonance_zeros(
    bound: u32,
    quads: *mut ZkQuadruple,
    capacity: usize,
    out_len: *mut usize,
) -> ZkStatus {
    if out_len.is_null() {
        return ZkStatus::NullPointer;
    }
    let zeros = match resonance::enumerate_resonances(bound) {
        Ok(z) => z,
        Err(e) => return status_of(&e),
    };
    *out_len = zeros.len();
    if quads.is_null() {
        return ZkStatus::Ok;
    }
    if capacity < zeros.len() {
        return ZkStatus::InvalidArgument;
    }
    for (i, q) in zeros.iter().enumerate() {
        *quads.add(i) = ZkQuadruple {
            m: q.m,
            m1: q.m1,
            n: q.n,
            n1: q.n1,
        };
    }
    ZkStatus::Ok
}

/// Builds the approximate solution `u_{theta,m}(t)` on an `mx x my` grid
/// and returns an owned handle through `out`.
///
/// # Safety
/// `out` must be a valid pointer; the returned handle must be released
/// with `zk_field_free`.
#[no_mangle]
pub unsafe extern "C" fn zk_field_approx(
    theta: f64,
    m: u32,
    s: f64,
    mx: usize,
    my: usize,
    t: f64,
    out: *mut *mut ZkField,
) -> ZkStatus {
    if out.is_null() {
        return ZkStatus::NullPointer;
    }
    let result = (|| {
        let grid = Grid::new(mx, my)?;
        let si = SobolevIndex::new(s)?;
        let params = ApproxSolutionParams::new(theta, m, si)?;
        build(&params, grid, t)
    })();
    match result {
        Ok(field) => {
            *out = Box::into_raw(Box::new(ZkField { inner: field }));
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Releases a field handle. NULL is a no-op.
///
/// # Safety
/// `field` must be a handle obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zk_field_free(field: *mut ZkField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Applies the linear propagator `W(t)` in place.
///
/// # Safety
/// `field` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn zk_field_propagate(field: *mut ZkField, t: f64) -> ZkStatus {
    let Some(f) = field.as_mut() else {
        return ZkStatus::NullPointer;
    };
    f.inner = propagate(&f.inner, t);
    ZkStatus::Ok
}

/// Advances the field by one integrating-factor RK4 step of the full
/// nonlinear equation.
///
/// # Safety
/// `field` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn zk_field_step(field: *mut ZkField, dt: f64) -> ZkStatus {
    let Some(f) = field.as_mut() else {
        return ZkStatus::NullPointer;
    };
    match step(&f.inner, dt) {
        Ok(next) => {
            f.inner = next;
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Sobolev norm `||f||_{H^s}`.
///
/// # Safety
/// `field` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zk_field_sobolev_norm(
    field: *const ZkField,
    s: f64,
    out: *mut f64,
) -> ZkStatus {
    let Some(f) = field.as_ref() else {
        return ZkStatus::NullPointer;
    };
    if out.is_null() {
        return ZkStatus::NullPointer;
    }
    match SobolevIndex::new(s) {
        Ok(si) => {
            *out = f.inner.sobolev_norm(si);
            ZkStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Fourier coefficient at `(m1, m2)` (zero off the retained lattice).
///
/// # Safety
/// `field` must be a live handle; `out_re`, `out_im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn zk_field_coefficient(
    field: *const ZkField,
    m1: i64,
    m2: i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ZkStatus {
    let Some(f) = field.as_ref() else {
        return ZkStatus::NullPointer;
    };
    if out_re.is_null() || out_im.is_null() {
        return ZkStatus::NullPointer;
    }
    let c = f.inner.get(m1, m2);
    *out_re = c.re;
    *out_im = c.im;
    ZkStatus::Ok
}

/// Integrates the field to `t_final` with step `dt`, recording observers
/// every `stride` steps, and writes the observer table (CSV) to `path`.
/// The handle itself is not modified.
///
/// # Safety
/// `field` must be a live handle; `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn zk_field_solve_csv(
    field: *const ZkField,
    dt: f64,
    t_final: f64,
    stride: u32,
    s: f64,
    path: *const c_char,
) -> ZkStatus {
    let Some(f) = field.as_ref() else {
        return ZkStatus::NullPointer;
    };
    if path.is_null() {
        return ZkStatus::NullPointer;
    }
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return ZkStatus::InvalidArgument;
    };
    let cfg = SolverConfig {
        dt,
        t_final,
        observer_stride: stride.max(1) as usize,
        dealias: true,
        hs_indices: vec![s],
        nonlinearity: 1.0,
    };
    let traj = match solve(&f.inner, &cfg) {
        Ok(t) => t,
        Err(e) => return status_of(&e),
    };
    if !traj.completed() {
        return ZkStatus::SolveFailed;
    }
    match std::fs::write(path, observers_to_csv(&traj, &cfg.hs_indices)) {
        Ok(()) => ZkStatus::Ok,
        Err(_) => ZkStatus::IoError,
    }
}
