//! Pseudo-spectral toolkit for the Zakharov-Kuznetsov equation on the 2-torus
//! `T^2 = R^2/(2*pi*Z)^2`:
//!
//! ```text
//! w_t + w_xxx + w_xyy + w w_x = 0
//! ```
//!
//! The crate provides:
//!
//! - [`spectral`]: Fourier representation of functions on the torus, FFT
//!   transforms, Sobolev norms, dyadic (Littlewood-Paley) projections, the
//!   linear propagator `W(t)` and smooth frequency cutoffs.
//! - [`solver`]: integrating-factor RK4 time integration of the full
//!   nonlinear equation with conservation diagnostics.
//! - [`resonance`]: exact integer arithmetic for the resonance function
//!   `R(m, m1, n, n1)` of triadic wave interactions, zero-set enumeration
//!   and the curvature identity `R(m, 0, -1, 2) = -8m`.
//! - [`approx`]: closed-form approximate solutions `u_{theta,m}` built on the
//!   resonant family, their residual under the flow and the distance
//!   profiles exhibiting failure of uniform continuity of the flow map.
//! - [`strichartz`]: numerical verification of dispersive decay — the
//!   oscillatory kernel `K_N`, its Poisson-summed representation, the
//!   Airy-type profile `F_N`, short-time/global Strichartz ratios and the
//!   Kato-Ponce commutator inequality.
//! - [`experiment`]: reproducible experiment orchestration (config files,
//!   CSV outputs, JSON manifests) behind the `zk-lab` command-line binary.
//!
//! Everything is deterministic given a seed; random ensembles use counted
//! ChaCha streams and reductions use fixed pairwise order.

pub mod approx;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod numerics;
pub mod resonance;
pub mod solver;
pub mod spectral;
pub mod strichartz;

pub use error::ZkError;
pub use grid::Grid;
pub use spectral::field::{RealField, SobolevIndex, SpectralField};
pub use spectral::project::DyadicBlock;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ZkError>;
