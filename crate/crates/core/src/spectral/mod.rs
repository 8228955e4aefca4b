//! Fourier representation of functions on the 2-torus.
//!
//! Convention: `f(x) = sum_m c_m exp(i m.x)` over the retained lattice, so
//! `||f||_{L2}^2 = (2*pi)^2 * sum |c_m|^2` (Parseval) and the `H^s` norm uses
//! the smooth multiplier `(1 + |m|^2)^{s/2}` of the operator `J^s`.

pub mod field;
pub mod project;
pub mod propagator;
pub mod transform;

pub use field::{RealField, SobolevIndex, SpectralField};
pub use project::{lp_project, DyadicBlock};
pub use propagator::{dispersion_symbol, phi, propagate, smooth_cutoff};
pub use transform::{analyze, synthesize};
