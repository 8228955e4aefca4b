//! Command-line front end for the simulation and analysis experiments.
//!
//! Every run writes RFC-4180 CSV outputs (17 significant digits) plus a
//! `manifest.json` with the fully resolved configuration, input hashes, the
//! output inventory and per-criterion pass/fail results. Identical
//! configurations reproduce byte-identical CSVs.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use zk_core::experiment::{
    parse_grid_spec, run_illposed, run_kernel, run_residual_scan, run_resonance, run_solve,
    run_strichartz, ConfigFile, FlagOverrides, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "zk-lab",
    version,
    about = "Pseudo-spectral experiments for the Zakharov-Kuznetsov equation on the 2-torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (key = value lines in [sections]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSVs and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed for ensemble commands.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Grid as MxxMy, e.g. 256x256.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Time step.
    #[arg(long, global = true)]
    dt: Option<f64>,

    /// Sobolev index.
    #[arg(long, global = true)]
    s: Option<f64>,

    /// Comma list of m values.
    #[arg(long, global = true, value_delimiter = ',')]
    m: Option<Vec<u32>>,

    /// Comma list of dyadic N values.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    n: Option<Vec<u32>>,

    /// Box bound for the resonance enumeration.
    #[arg(long, global = true)]
    bound: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the full equation from a family initial state.
    Solve,
    /// The end-to-end flow-map non-uniform-continuity experiment.
    Illposed,
    /// Decay law of the approximate-solution residual.
    ResidualScan,
    /// Short-time/global Strichartz ratios and the commutator inequality.
    Strichartz,
    /// Oscillatory kernel decay, Poisson resummation and Airy profiles.
    Kernel,
    /// Resonance zero-set enumeration and the curvature identity.
    Resonance,
}

fn main() -> ExitCode {
    match run() {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(path) => Some(ConfigFile::parse(path).context("loading config file")?),
        None => None,
    };
    let grid = cli
        .grid
        .as_deref()
        .map(parse_grid_spec)
        .transpose()
        .context("parsing --grid")?;
    let flags = FlagOverrides {
        out: cli.out,
        seed: cli.seed,
        grid,
        dt: cli.dt,
        s: cli.s,
        m: cli.m,
        n: cli.n,
        bound: cli.bound,
    };

    let manifest: RunManifest = match cli.command {
        Command::Solve => run_solve(file.as_ref(), &flags)?,
        Command::Illposed => run_illposed(file.as_ref(), &flags)?,
        Command::ResidualScan => run_residual_scan(file.as_ref(), &flags)?,
        Command::Strichartz => run_strichartz(file.as_ref(), &flags)?,
        Command::Kernel => run_kernel(file.as_ref(), &flags)?,
        Command::Resonance => run_resonance(file.as_ref(), &flags)?,
    };

    let mut all_ok = true;
    for c in &manifest.criteria {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        all_ok &= c.passed;
        if c.details.is_empty() {
            println!("{mark}  {}", c.name);
        } else {
            println!("{mark}  {}  ({})", c.name, c.details);
        }
    }
    println!(
        "{} outputs in {:.1}s (see manifest.json)",
        manifest.outputs.len(),
        manifest.wall_seconds
    );
    Ok(all_ok)
}
