//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ZkError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("mode ({0}, {1}) outside the retained lattice")]
    ModeOutOfRange(i64, i64),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("Hermitian symmetry violated: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    SymmetryViolation { defect: f64, tol: f64 },

    #[error("integer input {0} exceeds the overflow guard |{1}| <= 2e5")]
    IntegerOverflow(i64, &'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid {mx}x{my} too small for approximate solution with m = {m}: {need}")]
    GridTooSmall {
        mx: usize,
        my: usize,
        m: u32,
        need: &'static str,
    },

    #[error("solver blow-up at t = {t}: max |coefficient| = {max_coeff:.3e}")]
    BlowUp { t: f64, max_coeff: f64 },

    #[error("nonlinear stability violated at t = {t}: dt*max|w|*(Mx/3) = {value:.3e} > 0.5")]
    StabilityViolation { t: f64, value: f64 },

    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("need at least {need} data points, got {got}")]
    NotEnoughData { need: usize, got: usize },

    #[error("config error at {path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
