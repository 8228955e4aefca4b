//! Experiment orchestration: configuration, deterministic runs, CSV
//! outputs and JSON manifests behind the `zk-lab` command line.

pub mod config;
pub mod criteria;
pub mod manifest;
pub mod runners;

pub use config::{parse_grid_spec, ConfigFile};
pub use manifest::{CriterionResult, RunManifest, RunRecorder};
pub use runners::{
    run_illposed, run_kernel, run_residual_scan, run_resonance, run_solve, run_strichartz,
    FlagOverrides, IllposedConfig, KernelConfig, ResidualScanConfig, ResonanceConfig, SolveConfig,
    StrichartzConfig,
};
