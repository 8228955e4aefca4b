//! Numerical verification of the dispersive machinery: the oscillatory
//! kernel `K_N` and its `|t|^{-2/3}` decay, the Poisson-summed
//! representation through the Airy-type profile `F_N` and its `|t|^{-1/3}`
//! bound, short-time and global Strichartz ratios, and the Kato-Ponce
//! commutator inequality.

pub mod airy;
pub mod estimates;
pub mod kernel;
pub mod poisson;

pub use airy::{airy_profile, AiryQuadrature};
pub use estimates::{
    commutator_ratio, commutator_test, global_strichartz, short_time_strichartz, CommutatorStats,
    EnsembleSpec, GlobalStats, ShortTimeStats,
};
pub use kernel::{
    kernel_decay_scan, kernel_direct, kernel_direct_grid, KernelDecayRow, KernelProbe,
};
pub use poisson::kernel_poisson;
