//! The experiment runners behind the CLI subcommands. Each consumes a typed
//! configuration (defaults, overridden by a config file, overridden by
//! flags), writes CSV outputs plus a JSON manifest into the run directory,
//! and returns the manifest.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::approx::{build, distance_profile, residual_norm_scan, ApproxSolutionParams};
use crate::experiment::config::ConfigFile;
use crate::experiment::criteria as crit;
use crate::experiment::manifest::{csv_num, RunManifest, RunRecorder};
use crate::grid::Grid;
use crate::numerics::fit_loglog;
use crate::resonance::{
    curvature, enumerate_resonances, quadruples_to_csv, resonance, resonance_definitional,
};
use crate::solver::{
    g_t_diagnostic, hs_growth_check, observers_to_csv, solve, SolverConfig, Trajectory,
    DEFAULT_GROWTH_CEILING,
};
use crate::spectral::field::SobolevIndex;
use crate::spectral::project::DyadicBlock;
use crate::strichartz::airy::airy_profile;
use crate::strichartz::estimates::{
    commutator_test, global_strichartz, short_time_strichartz, EnsembleSpec,
};
use crate::strichartz::kernel::{kernel_decay_scan, kernel_direct, KernelProbe};
use crate::strichartz::poisson::kernel_poisson;
use crate::{Result, ZkError};

/// Values of the shared CLI flags; `None` keeps the file/default value.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub grid: Option<(usize, usize)>,
    pub dt: Option<f64>,
    pub s: Option<f64>,
    pub m: Option<Vec<u32>>,
    pub n: Option<Vec<u32>>,
    pub bound: Option<u32>,
}

/// Union schema of every recognized config section/key, used to reject
/// unknown entries by name.
pub const CONFIG_SCHEMA: &[(&str, &[&str])] = &[
    ("run", &["out", "seed"]),
    ("grid", &["mx", "my", "oversample"]),
    (
        "solve",
        &[
            "dt",
            "t_final",
            "observer_stride",
            "dealias",
            "hs",
            "theta",
            "m",
            "s",
            "nonlinearity",
        ],
    ),
    ("illposed", &["dt", "t_final", "observer_stride", "m", "s"]),
    ("residual-scan", &["theta", "s", "m"]),
    (
        "strichartz",
        &[
            "n",
            "count",
            "s_prime",
            "global_band",
            "commutator_s",
            "commutator_band",
            "commutator_pairs",
        ],
    ),
    (
        "kernel",
        &["n", "t_points", "grid_points", "truncation", "airy_n"],
    ),
    ("resonance", &["bound", "curvature_max"]),
];

fn section_grid(file: Option<&ConfigFile>, flags: &FlagOverrides, default: usize) -> Result<Grid> {
    let mut mx = default;
    let mut my = default;
    let mut oversample = 4usize;
    if let Some(f) = file {
        if let Some(v) = f.get_usize("grid", "mx")? {
            mx = v;
        }
        if let Some(v) = f.get_usize("grid", "my")? {
            my = v;
        }
        if let Some(v) = f.get_usize("grid", "oversample")? {
            oversample = v;
        }
    }
    if let Some((fx, fy)) = flags.grid {
        mx = fx;
        my = fy;
    }
    Grid::with_oversample(mx, my, oversample)
}

fn common_out(file: Option<&ConfigFile>, flags: &FlagOverrides, command: &str) -> PathBuf {
    flags
        .out
        .clone()
        .or_else(|| {
            file.and_then(|f| f.get_string("run", "out"))
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(format!("runs/{command}")))
}

fn common_seed(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<u64> {
    if let Some(s) = flags.seed {
        return Ok(s);
    }
    if let Some(f) = file {
        if let Some(s) = f.get_u64("run", "seed")? {
            return Ok(s);
        }
    }
    Ok(0x5a4b_2024)
}

fn validate_file(file: Option<&ConfigFile>) -> Result<()> {
    if let Some(f) = file {
        f.validate_schema(CONFIG_SCHEMA)?;
    }
    Ok(())
}

fn recorder(
    command: &str,
    out: &Path,
    config_json: serde_json::Value,
    file: Option<&ConfigFile>,
) -> Result<RunRecorder> {
    let mut rec = RunRecorder::new(command, out, config_json)?;
    if let Some(f) = file {
        let p = PathBuf::from(&f.path);
        if p.exists() {
            rec.hash_input(&p)?;
        }
    }
    Ok(rec)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SolveConfig {
    pub theta: f64,
    pub m: u32,
    pub s: f64,
    pub dt: f64,
    pub t_final: f64,
    pub observer_stride: usize,
    pub dealias: bool,
    pub hs: Vec<f64>,
    pub nonlinearity: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            m: 32,
            s: 2.0,
            dt: 5e-4,
            t_final: 1.0,
            observer_stride: 20,
            dealias: true,
            hs: vec![2.0],
            nonlinearity: 1.0,
        }
    }
}

impl SolveConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_f64("solve", "dt")? {
                cfg.dt = v;
            }
            if let Some(v) = f.get_f64("solve", "t_final")? {
                cfg.t_final = v;
            }
            if let Some(v) = f.get_usize("solve", "observer_stride")? {
                cfg.observer_stride = v;
            }
            if let Some(v) = f.get_bool("solve", "dealias")? {
                cfg.dealias = v;
            }
            if let Some(v) = f.get_f64_list("solve", "hs")? {
                cfg.hs = v;
            }
            if let Some(v) = f.get_f64("solve", "theta")? {
                cfg.theta = v;
            }
            if let Some(v) = f.get_u64("solve", "m")? {
                cfg.m = v as u32;
            }
            if let Some(v) = f.get_f64("solve", "s")? {
                cfg.s = v;
            }
            if let Some(v) = f.get_f64("solve", "nonlinearity")? {
                cfg.nonlinearity = v;
            }
        }
        if let Some(v) = flags.dt {
            cfg.dt = v;
        }
        if let Some(v) = flags.s {
            cfg.s = v;
        }
        if let Some(ms) = &flags.m {
            cfg.m = *ms
                .first()
                .ok_or_else(|| ZkError::InvalidParameter("--m needs at least one value".into()))?;
        }
        Ok(cfg)
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            dt: self.dt,
            t_final: self.t_final,
            observer_stride: self.observer_stride,
            dealias: self.dealias,
            hs_indices: self.hs.clone(),
            nonlinearity: self.nonlinearity,
        }
    }
}

/// Relative drift of the conserved quantities along a trajectory.
fn conservation_drift(traj: &Trajectory) -> (f64, serde_json::Value) {
    let first = &traj.observers[0];
    let rel = |now: f64, base: f64| (now - base).abs() / base.abs().max(1e-30);
    let mut worst = 0.0f64;
    let mut mass_d = 0.0f64;
    let mut l2_d = 0.0f64;
    let mut energy_d = 0.0f64;
    for o in &traj.observers[1..] {
        mass_d = mass_d.max(rel(o.mass, first.mass));
        l2_d = l2_d.max(rel(o.l2, first.l2));
        energy_d = energy_d.max(rel(o.energy, first.energy));
    }
    // x-mean modes compared state-to-state (exactly conserved by the scheme)
    let base = crate::solver::invariants(&traj.states[0]);
    let mut xmean_d = 0.0f64;
    for st in &traj.states[1..] {
        let inv = crate::solver::invariants(st);
        for ((_, a), (_, b)) in inv.x_mean_modes.iter().zip(&base.x_mean_modes) {
            let scale = b.norm().max(1e-30);
            xmean_d = xmean_d.max((a - b).norm() / scale.max(base.l2 / 1e3));
        }
    }
    worst = worst.max(mass_d).max(l2_d).max(energy_d).max(xmean_d);
    (
        worst,
        json!({
            "mass": mass_d,
            "l2": l2_d,
            "energy": energy_d,
            "x_mean": xmean_d,
        }),
    )
}

pub fn run_solve(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = SolveConfig::from_sources(file, flags)?;
    let grid = section_grid(file, flags, 128)?;
    let out = common_out(file, flags, "solve");
    let mut rec = recorder(
        "solve",
        &out,
        json!({"solve": cfg, "grid": grid, "seed": common_seed(file, flags)?}),
        file,
    )?;

    let s = SobolevIndex::new(cfg.s)?;
    let params = ApproxSolutionParams::new(cfg.theta, cfg.m, s)?;
    let w0 = build(&params, grid, 0.0)?;
    let traj = solve(&w0, &cfg.solver())?;
    rec.write_output("observers.csv", &observers_to_csv(&traj, &cfg.hs))?;

    rec.criterion(
        "trajectory_completed",
        traj.completed(),
        format!("{:?}", traj.status),
    );
    let (worst, details) = conservation_drift(&traj);
    rec.criterion(
        "conservation_drift",
        worst <= crit::CONSERVATION_TOL,
        details.to_string(),
    );
    let g_t = g_t_diagnostic(&traj)?;
    let growth = hs_growth_check(&traj, s, DEFAULT_GROWTH_CEILING)?;
    rec.criterion(
        "hs_growth_within_ceiling",
        !growth.exceeded,
        format!(
            "max_ratio = {:.6}, g(T) = {:.6}, implied c = {:.4}",
            growth.max_ratio, g_t, growth.implied_constant
        ),
    );
    rec.write_output(
        "solve_summary.json",
        &serde_json::to_string_pretty(&json!({
            "g_t": g_t,
            "growth": growth,
            "status": format!("{:?}", traj.status),
        }))?,
    )?;
    rec.finish()
}

// ---------------------------------------------------------------------------
// illposed
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct IllposedConfig {
    pub ms: Vec<u32>,
    pub s: f64,
    pub dt: f64,
    pub t_final: f64,
    pub observer_stride: usize,
}

impl Default for IllposedConfig {
    fn default() -> Self {
        Self {
            ms: vec![16, 32, 64],
            s: 2.0,
            dt: 5e-4,
            t_final: 1.0,
            observer_stride: 40,
        }
    }
}

impl IllposedConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_f64("illposed", "dt")? {
                cfg.dt = v;
            }
            if let Some(v) = f.get_f64("illposed", "t_final")? {
                cfg.t_final = v;
            }
            if let Some(v) = f.get_usize("illposed", "observer_stride")? {
                cfg.observer_stride = v;
            }
            if let Some(v) = f.get_u32_list("illposed", "m")? {
                cfg.ms = v;
            }
            if let Some(v) = f.get_f64("illposed", "s")? {
                cfg.s = v;
            }
        }
        if let Some(v) = flags.dt {
            cfg.dt = v;
        }
        if let Some(v) = flags.s {
            cfg.s = v;
        }
        if let Some(ms) = &flags.m {
            cfg.ms = ms.clone();
        }
        Ok(cfg)
    }
}

/// Everything measured for one `m` of the ill-posedness family.
#[derive(Debug, Clone, Serialize)]
pub struct IllposedMemberReport {
    pub m: u32,
    pub completed: bool,
    pub sup_hs_u: f64,
    pub sup_hs_v: f64,
    /// `||u_m(0) - v_m(0)||_{H^s}`.
    pub initial_distance: f64,
    /// Least-squares linear-growth constant of the distance on the fit
    /// window.
    pub fitted_c: f64,
    /// `min over the fit window of d(t) / (2 |sin(t/2)| pi sqrt(2))`.
    pub min_lower_bound_ratio: f64,
    /// `sup_t ||u_m(t) - u_{1,m}(t)||_{H^s}` (numerical flow vs closed-form
    /// family member).
    pub sup_gap: f64,
    pub csv: String,
}

/// Solves the pair `u_{1,m}`, `u_{-1,m}` through the full equation and
/// measures everything the quantitative checks need.
pub fn solve_illposed_member(
    m: u32,
    grid: Grid,
    s: SobolevIndex,
    solver_cfg: &SolverConfig,
) -> Result<IllposedMemberReport> {
    let p_plus = ApproxSolutionParams::new(1.0, m, s)?;
    let p_minus = ApproxSolutionParams::new(-1.0, m, s)?;
    let u0 = build(&p_plus, grid, 0.0)?;
    let v0 = build(&p_minus, grid, 0.0)?;
    let tu = solve(&u0, solver_cfg)?;
    let tv = solve(&v0, solver_cfg)?;
    let completed = tu.completed() && tv.completed();
    let steps = tu.times.len().min(tv.times.len());

    let prof = distance_profile(m, s, &tu.times[..steps])?;
    let mut csv = String::from("t,distance,approx_distance,predicted,gap_u,gap_v\r\n");
    let mut sup_hs_u = 0.0f64;
    let mut sup_hs_v = 0.0f64;
    let mut sup_gap = 0.0f64;
    let mut fit_ts = Vec::new();
    let mut fit_ds = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut initial_distance = 0.0;
    for k in 0..steps {
        let t = tu.times[k];
        let d = tu.states[k].sub(&tv.states[k]).sobolev_norm(s);
        let gap_u = tu.states[k].sub(&build(&p_plus, grid, t)?).sobolev_norm(s);
        let gap_v = tv.states[k].sub(&build(&p_minus, grid, t)?).sobolev_norm(s);
        sup_hs_u = sup_hs_u.max(tu.states[k].sobolev_norm(s));
        sup_hs_v = sup_hs_v.max(tv.states[k].sobolev_norm(s));
        sup_gap = sup_gap.max(gap_u);
        if k == 0 {
            initial_distance = d;
        }
        let predicted = prof[k].predicted;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\r\n",
            csv_num(t),
            csv_num(d),
            csv_num(prof[k].hs_distance),
            csv_num(predicted),
            csv_num(gap_u),
            csv_num(gap_v)
        ));
        if t >= crit::DISTANCE_FIT_T_MIN {
            fit_ts.push(t);
            fit_ds.push(d);
            if predicted > 0.0 {
                min_ratio = min_ratio.min(d / predicted);
            }
        }
    }
    // linear growth constant: least squares through the origin
    let fitted_c = if fit_ts.is_empty() {
        0.0
    } else {
        let num: f64 = fit_ts.iter().zip(&fit_ds).map(|(t, d)| t * d).sum();
        let den: f64 = fit_ts.iter().map(|t| t * t).sum();
        num / den
    };
    Ok(IllposedMemberReport {
        m,
        completed,
        sup_hs_u,
        sup_hs_v,
        initial_distance,
        fitted_c,
        min_lower_bound_ratio: min_ratio,
        sup_gap,
        csv,
    })
}

/// The end-to-end ill-posedness experiment: solves the full equation from
/// `u_{1,m}(0)` and `u_{-1,m}(0)` for every `m`, records distance profiles
/// and the flow-vs-family gap, and fits the quantitative laws.
pub fn run_illposed(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = IllposedConfig::from_sources(file, flags)?;
    if cfg.ms.len() < 2 {
        return Err(ZkError::NotEnoughData {
            need: 2,
            got: cfg.ms.len(),
        });
    }
    let grid = section_grid(file, flags, 256)?;
    let out = common_out(file, flags, "illposed");
    let mut rec = recorder(
        "illposed",
        &out,
        json!({"illposed": cfg, "grid": grid}),
        file,
    )?;

    let s = SobolevIndex::new(cfg.s)?;
    let solver_cfg = SolverConfig {
        dt: cfg.dt,
        t_final: cfg.t_final,
        observer_stride: cfg.observer_stride,
        dealias: true,
        hs_indices: vec![cfg.s],
        nonlinearity: 1.0,
    };
    let reports: Vec<Result<IllposedMemberReport>> = cfg
        .ms
        .par_iter()
        .map(|&m| solve_illposed_member(m, grid, s, &solver_cfg))
        .collect();
    let mut members = Vec::new();
    for r in reports {
        members.push(r?);
    }
    for rep in &members {
        rec.write_output(&format!("distance_m{:04}.csv", rep.m), &rep.csv)?;
        rec.criterion(
            &format!("m{}_solver_completed", rep.m),
            rep.completed,
            String::new(),
        );
    }

    // (a) uniform H^s bound across the family
    let sups: Vec<f64> = members
        .iter()
        .flat_map(|r| [r.sup_hs_u, r.sup_hs_v])
        .collect();
    let sup_max = sups.iter().cloned().fold(0.0, f64::max);
    let sup_min = sups.iter().cloned().fold(f64::INFINITY, f64::min);
    rec.criterion(
        "uniform_hs_bound",
        sup_max <= crit::ILLPOSED_SUP_BOUND && sup_max / sup_min <= crit::ILLPOSED_SUP_SPREAD,
        format!("sup norms in [{sup_min:.4}, {sup_max:.4}]"),
    );

    // (b) initial distance ~ 1/m: halving within 10% per doubling
    let mut ratio_ok = true;
    let mut ratio_details = String::new();
    for w in members.windows(2) {
        if w[1].m == 2 * w[0].m {
            let ratio = w[0].initial_distance / w[1].initial_distance;
            ratio_ok &= (ratio - 2.0).abs() <= 2.0 * crit::INIT_DISTANCE_RATIO_TOL;
            ratio_details.push_str(&format!("d0({})/d0({}) = {ratio:.4}; ", w[0].m, w[1].m));
        }
    }
    rec.criterion("initial_distance_m_inverse", ratio_ok, ratio_details);

    // (c) distance stays above the resonant lower bound on the fit window
    let min_ratio = members
        .iter()
        .map(|r| r.min_lower_bound_ratio)
        .fold(f64::INFINITY, f64::min);
    rec.criterion(
        "distance_lower_bound",
        min_ratio >= crit::DISTANCE_LOWER_FACTOR,
        format!("min d(t)/(2|sin(t/2)| pi sqrt2) = {min_ratio:.4}"),
    );

    // (d) flow-vs-family gap decays: fitted exponent of sup_t gap vs m
    let xs: Vec<f64> = members.iter().map(|r| r.m as f64).collect();
    let gaps: Vec<f64> = members.iter().map(|r| r.sup_gap).collect();
    let gap_fit = fit_loglog(&xs, &gaps)?;
    let epsilon = -gap_fit.slope;
    rec.criterion(
        "gap_exponent_positive",
        epsilon > 0.0,
        format!("fitted epsilon = {epsilon:.4}"),
    );

    let d0_fit = fit_loglog(
        &xs,
        &members
            .iter()
            .map(|r| r.initial_distance)
            .collect::<Vec<_>>(),
    )?;
    let summary = json!({
        "members": members.iter().map(|r| json!({
            "m": r.m,
            "completed": r.completed,
            "sup_hs_u": r.sup_hs_u,
            "sup_hs_v": r.sup_hs_v,
            "initial_distance": r.initial_distance,
            "fitted_c": r.fitted_c,
            "min_lower_bound_ratio": r.min_lower_bound_ratio,
            "sup_gap": r.sup_gap,
        })).collect::<Vec<_>>(),
        "initial_distance_slope": d0_fit.slope,
        "gap_epsilon": epsilon,
    });
    rec.write_output(
        "illposed_summary.json",
        &serde_json::to_string_pretty(&summary)?,
    )?;
    rec.finish()
}

// ---------------------------------------------------------------------------
// residual-scan
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ResidualScanConfig {
    pub theta: f64,
    pub s_values: Vec<f64>,
    pub ms: Vec<u32>,
}

impl Default for ResidualScanConfig {
    fn default() -> Self {
        Self {
            theta: 1.0,
            s_values: vec![1.7, 2.0, 2.5],
            ms: vec![8, 16, 32, 64],
        }
    }
}

impl ResidualScanConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_f64("residual-scan", "theta")? {
                cfg.theta = v;
            }
            if let Some(v) = f.get_f64_list("residual-scan", "s")? {
                cfg.s_values = v;
            }
            if let Some(v) = f.get_u32_list("residual-scan", "m")? {
                cfg.ms = v;
            }
        }
        if let Some(v) = flags.s {
            cfg.s_values = vec![v];
        }
        if let Some(ms) = &flags.m {
            cfg.ms = ms.clone();
        }
        Ok(cfg)
    }
}

pub fn run_residual_scan(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = ResidualScanConfig::from_sources(file, flags)?;
    let out = common_out(file, flags, "residual-scan");
    let mut rec = recorder("residual-scan", &out, json!({"residual-scan": cfg}), file)?;

    let mut summaries = Vec::new();
    for &sv in &cfg.s_values {
        let s = SobolevIndex::new(sv)?;
        let scan = residual_norm_scan(cfg.theta, s, &cfg.ms)?;
        let mut csv = String::from("m,l2_residual,hs_residual\r\n");
        for row in &scan.rows {
            csv.push_str(&format!(
                "{},{},{}\r\n",
                row.m,
                csv_num(row.l2_norm),
                csv_num(row.hs_norm)
            ));
        }
        rec.write_output(&format!("residual_scan_s{sv}.csv"), &csv)?;
        let target = (-1.0 - sv).max(1.0 - 2.0 * sv);
        rec.criterion(
            &format!("l2_slope_s{sv}"),
            (scan.l2_slope - target).abs() <= crit::RESIDUAL_SLOPE_TOL,
            format!("fitted {:.4}, target {:.2}", scan.l2_slope, target),
        );
        summaries.push(json!({
            "s": sv,
            "l2_slope": scan.l2_slope,
            "hs_slope": scan.hs_slope,
            "target": target,
        }));
    }
    rec.write_output(
        "residual_scan_summary.json",
        &serde_json::to_string_pretty(&json!({"scans": summaries}))?,
    )?;
    rec.finish()
}

// ---------------------------------------------------------------------------
// strichartz
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzConfig {
    pub ns: Vec<u32>,
    pub count: u32,
    pub s_prime: f64,
    /// Top band of the global scan; 0 disables it.
    pub global_band: u32,
    pub commutator_s: Vec<f64>,
    pub commutator_band: u32,
    pub commutator_pairs: u32,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self {
            ns: vec![4, 8, 16, 32, 64],
            count: 64,
            s_prime: 0.75,
            global_band: 8,
            commutator_s: vec![1.0, 2.0],
            commutator_band: 4,
            commutator_pairs: 200,
        }
    }
}

impl StrichartzConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_u32_list("strichartz", "n")? {
                cfg.ns = v;
            }
            if let Some(v) = f.get_u64("strichartz", "count")? {
                cfg.count = v as u32;
            }
            if let Some(v) = f.get_f64("strichartz", "s_prime")? {
                cfg.s_prime = v;
            }
            if let Some(v) = f.get_u64("strichartz", "global_band")? {
                cfg.global_band = v as u32;
            }
            if let Some(v) = f.get_f64_list("strichartz", "commutator_s")? {
                cfg.commutator_s = v;
            }
            if let Some(v) = f.get_u64("strichartz", "commutator_band")? {
                cfg.commutator_band = v as u32;
            }
            if let Some(v) = f.get_u64("strichartz", "commutator_pairs")? {
                cfg.commutator_pairs = v as u32;
            }
        }
        if let Some(ns) = &flags.n {
            cfg.ns = ns.clone();
        }
        if let Some(v) = flags.s {
            cfg.s_prime = v;
        }
        Ok(cfg)
    }
}

pub fn run_strichartz(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = StrichartzConfig::from_sources(file, flags)?;
    let seed = common_seed(file, flags)?;
    let out = common_out(file, flags, "strichartz");
    let mut rec = recorder(
        "strichartz",
        &out,
        json!({"strichartz": cfg, "seed": seed}),
        file,
    )?;

    // short-time scan
    let mut csv = String::from("N,t,value,bound\r\n");
    let mut ns_f = Vec::new();
    let mut ratios = Vec::new();
    let mut worst_unitarity = 0.0f64;
    for &n in &cfg.ns {
        let block = DyadicBlock::new(n)?;
        let ens = EnsembleSpec::new(cfg.count, seed, block)?;
        let stats = short_time_strichartz(block, &ens)?;
        worst_unitarity = worst_unitarity.max(stats.unitarity_defect);
        csv.push_str(&format!(
            "{},{},{},{}\r\n",
            n,
            csv_num(stats.interval),
            csv_num(stats.max_ratio),
            csv_num((n.max(1) as f64).powf(-1.0 / 3.0))
        ));
        ns_f.push(n.max(1) as f64);
        ratios.push(stats.max_ratio);
    }
    rec.write_output("short_time.csv", &csv)?;
    let st_fit = fit_loglog(&ns_f, &ratios)?;
    rec.criterion(
        "short_time_slope",
        st_fit.slope <= crit::SHORT_TIME_SLOPE_MAX,
        format!("fitted slope {:.4}", st_fit.slope),
    );
    rec.criterion(
        "quadrature_unitarity",
        worst_unitarity <= 1e-12,
        format!("max L2 drift {worst_unitarity:.3e}"),
    );

    // global scan (reported; the trend carries the content)
    let mut global_json = json!(null);
    if cfg.global_band >= 4 {
        let ens = EnsembleSpec::new(cfg.count.min(8), seed, DyadicBlock::new(cfg.global_band)?)?;
        let stats = global_strichartz(SobolevIndex::new(cfg.s_prime)?, &ens)?;
        let mut csv = String::from("N,t,value,bound\r\n");
        for row in &stats.rows {
            csv.push_str(&format!(
                "{},{},{},{}\r\n",
                row.n,
                csv_num(1.0),
                csv_num(row.max_ratio),
                csv_num(0.0)
            ));
        }
        rec.write_output("global.csv", &csv)?;
        if stats.rows.len() >= 2 {
            let last = &stats.rows[stats.rows.len() - 1];
            let prev_max = stats.rows[..stats.rows.len() - 1]
                .iter()
                .map(|r| r.max_ratio)
                .fold(0.0, f64::max);
            rec.criterion(
                "global_ratio_stabilizes",
                last.max_ratio <= prev_max * 1.1,
                format!("top band {} vs earlier max {prev_max:.4}", last.max_ratio),
            );
        }
        global_json = serde_json::to_value(&stats)?;
    }

    // commutator at the base band and at twice the band
    let mut comm_csv = String::from("s,band,max_ratio\r\n");
    let mut comm_rows = Vec::new();
    for &sv in &cfg.commutator_s {
        let s = SobolevIndex::new(sv)?;
        let base = commutator_test(
            &EnsembleSpec::new(
                cfg.commutator_pairs,
                seed,
                DyadicBlock::new(cfg.commutator_band)?,
            )?,
            s,
        )?;
        let doubled = commutator_test(
            &EnsembleSpec::new(
                cfg.commutator_pairs,
                seed,
                DyadicBlock::new(cfg.commutator_band * 2)?,
            )?,
            s,
        )?;
        comm_csv.push_str(&format!(
            "{},{},{}\r\n",
            sv,
            base.band,
            csv_num(base.max_ratio)
        ));
        comm_csv.push_str(&format!(
            "{},{},{}\r\n",
            sv,
            doubled.band,
            csv_num(doubled.max_ratio)
        ));
        rec.criterion(
            &format!("commutator_bounded_s{sv}"),
            base.max_ratio <= crit::COMMUTATOR_BOUND
                && doubled.max_ratio <= base.max_ratio * (1.0 + crit::COMMUTATOR_GROWTH_TOL),
            format!(
                "base {:.4}, doubled band {:.4}",
                base.max_ratio, doubled.max_ratio
            ),
        );
        comm_rows.push(json!({
            "s": sv,
            "base": base,
            "doubled": doubled,
        }));
    }
    rec.write_output("commutator.csv", &comm_csv)?;

    rec.write_output(
        "strichartz_summary.json",
        &serde_json::to_string_pretty(&json!({
            "short_time_slope": st_fit.slope,
            "global": global_json,
            "commutator": comm_rows,
        }))?,
    )?;
    rec.finish()
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct KernelConfig {
    pub ns: Vec<u32>,
    pub t_points: usize,
    pub grid_points: usize,
    pub truncation: u32,
    /// Dyadic scales of the Airy profile scan.
    pub airy_ns: Vec<u32>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            ns: vec![4, 8, 16],
            t_points: 8,
            grid_points: 64,
            truncation: 8,
            airy_ns: vec![4, 8, 16, 32, 64],
        }
    }
}

impl KernelConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_u32_list("kernel", "n")? {
                cfg.ns = v;
            }
            if let Some(v) = f.get_usize("kernel", "t_points")? {
                cfg.t_points = v;
            }
            if let Some(v) = f.get_usize("kernel", "grid_points")? {
                cfg.grid_points = v;
            }
            if let Some(v) = f.get_u64("kernel", "truncation")? {
                cfg.truncation = v as u32;
            }
            if let Some(v) = f.get_u32_list("kernel", "airy_n")? {
                cfg.airy_ns = v;
            }
        }
        if let Some(ns) = &flags.n {
            cfg.ns = ns.clone();
        }
        Ok(cfg)
    }
}

/// `sup_X |F_N(X, t)|` over `X in [-10, 10]`: a coarse sweep plus a fine
/// sweep around the Airy peak (width ~ t^{1/3} near the origin).
pub fn airy_sup(n: u32, t: f64) -> Result<f64> {
    let mut sup = 0.0f64;
    for j in 0..=80 {
        let x = -10.0 + 20.0 * j as f64 / 80.0;
        sup = sup.max(airy_profile(x, t, n)?.norm());
    }
    let w = (t.abs() / 2.0).powf(1.0 / 3.0);
    for j in 0..=120 {
        let x = -8.0 * w + 11.0 * w * j as f64 / 120.0;
        sup = sup.max(airy_profile(x, t, n)?.norm());
    }
    Ok(sup)
}

pub fn run_kernel(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = KernelConfig::from_sources(file, flags)?;
    let out = common_out(file, flags, "kernel");
    let mut rec = recorder("kernel", &out, json!({"kernel": cfg}), file)?;

    // decay scan; constant fitted at the smallest N and reused
    let mut rows_by_n = Vec::new();
    for &n in &cfg.ns {
        let rows = kernel_decay_scan(DyadicBlock::new(n)?, cfg.t_points, cfg.grid_points)?;
        rows_by_n.push(rows);
    }
    let c_fit = rows_by_n[0]
        .iter()
        .map(|r| r.bound_constant)
        .fold(0.0, f64::max);
    let mut csv = String::from("N,t,value,bound\r\n");
    let mut bound_ok = true;
    let mut exponents = Vec::new();
    for rows in &rows_by_n {
        for r in rows {
            csv.push_str(&format!(
                "{},{},{},{}\r\n",
                r.n,
                csv_num(r.t),
                csv_num(r.value),
                csv_num(c_fit * r.t.powf(-2.0 / 3.0))
            ));
            bound_ok &= r.value <= crit::KERNEL_CONSTANT_FACTOR * c_fit * r.t.powf(-2.0 / 3.0);
        }
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let vs: Vec<f64> = rows.iter().map(|r| r.value).collect();
        exponents.push((rows[0].n, fit_loglog(&ts, &vs)?.slope));
    }
    rec.write_output("kernel_decay.csv", &csv)?;
    rec.criterion(
        "kernel_single_constant_bound",
        bound_ok,
        format!("C fitted at N={} is {c_fit:.4}", cfg.ns[0]),
    );
    let worst_exponent = exponents
        .iter()
        .map(|&(_, e)| e)
        .fold(f64::NEG_INFINITY, f64::max);
    rec.criterion(
        "kernel_decay_exponent",
        worst_exponent <= crit::KERNEL_EXPONENT_MAX,
        format!("per-N exponents {exponents:?}"),
    );

    // direct vs Poisson agreement at the smallest N, at the cheap window
    // edge (trunc as configured) and at the expensive edge (trunc 32)
    let n0 = cfg.ns[0];
    let mut pcsv = String::from("t,truncation,x,y,direct_re,poisson_re,abs_err\r\n");
    let mut agree = true;
    let nf = n0 as f64;
    for (t, trunc) in [(nf.powi(-3), cfg.truncation), (nf.powi(-2), 32)] {
        let probe = KernelProbe::new(DyadicBlock::new(n0)?, t, trunc)?;
        let scale = kernel_direct(&probe, 0.0, 0.0).norm();
        for &(x, y) in &[(0.0, 0.0), (1.3, 0.4), (3.5, 0.7)] {
            let direct = kernel_direct(&probe, x, y);
            let poisson = kernel_poisson(&probe, x, y)?;
            let err = (direct - poisson).norm();
            agree &= err <= crit::POISSON_AGREEMENT_TOL * scale;
            pcsv.push_str(&format!(
                "{},{},{},{},{},{},{}\r\n",
                csv_num(t),
                trunc,
                csv_num(x),
                csv_num(y),
                csv_num(direct.re),
                csv_num(poisson.re),
                csv_num(err)
            ));
        }
    }
    rec.write_output("poisson_check.csv", &pcsv)?;
    rec.criterion("poisson_agreement", agree, String::new());

    // Airy profile decay and far field
    let mut acsv = String::from("N,t,value,bound\r\n");
    let mut airy_constants = Vec::new();
    let mut airy_exponents = Vec::new();
    for &n in &cfg.airy_ns {
        let nf = n as f64;
        let mut ts = Vec::new();
        let mut sups = Vec::new();
        for i in 0..6 {
            let frac = i as f64 / 5.0;
            let t = nf.powi(-3) * nf.powf(frac);
            let sup = airy_sup(n, t)?;
            ts.push(t);
            sups.push(sup);
        }
        let c_n = ts
            .iter()
            .zip(&sups)
            .map(|(t, s)| s * t.powf(1.0 / 3.0))
            .fold(0.0, f64::max);
        airy_constants.push(c_n);
        for (t, s) in ts.iter().zip(&sups) {
            acsv.push_str(&format!(
                "{},{},{},{}\r\n",
                n,
                csv_num(*t),
                csv_num(*s),
                csv_num(c_n * t.powf(-1.0 / 3.0))
            ));
        }
        airy_exponents.push(fit_loglog(&ts, &sups)?.slope);
    }
    rec.write_output("airy_decay.csv", &acsv)?;
    let c_max = airy_constants.iter().cloned().fold(0.0, f64::max);
    let c_min = airy_constants.iter().cloned().fold(f64::INFINITY, f64::min);
    rec.criterion(
        "airy_constant_stable",
        c_max <= crit::AIRY_CONSTANT_FACTOR * c_min,
        format!("constants in [{c_min:.4}, {c_max:.4}]"),
    );
    let worst_airy = airy_exponents
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    rec.criterion(
        "airy_decay_exponent",
        worst_airy <= crit::AIRY_EXPONENT_MAX,
        format!("per-N exponents {airy_exponents:?}"),
    );

    let mut far_ok = true;
    let mut fcsv = String::from("N,X,value,bound\r\n");
    for &n in &cfg.airy_ns {
        let t = (n as f64).powi(-2);
        for x in [150.0, 250.0, 400.0] {
            let v = airy_profile(x, t, n)?.norm();
            let bound = crit::AIRY_FAR_FIELD_C / ((n as f64).powi(2) * x.powi(3));
            far_ok &= v <= bound;
            fcsv.push_str(&format!(
                "{},{},{},{}\r\n",
                n,
                csv_num(x),
                csv_num(v),
                csv_num(bound)
            ));
        }
    }
    rec.write_output("airy_far_field.csv", &fcsv)?;
    rec.criterion("airy_far_field", far_ok, String::new());

    rec.write_output(
        "kernel_summary.json",
        &serde_json::to_string_pretty(&json!({
            "kernel_constant": c_fit,
            "kernel_exponents": exponents,
            "airy_constants": airy_constants,
            "airy_exponents": airy_exponents,
        }))?,
    )?;
    rec.finish()
}

// ---------------------------------------------------------------------------
// resonance
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ResonanceConfig {
    pub bound: u32,
    pub curvature_max: i64,
}

impl Default for ResonanceConfig {
    fn default() -> Self {
        Self {
            bound: 10,
            curvature_max: 100_000,
        }
    }
}

impl ResonanceConfig {
    pub fn from_sources(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(f) = file {
            if let Some(v) = f.get_u64("resonance", "bound")? {
                cfg.bound = v as u32;
            }
            if let Some(v) = f.get_u64("resonance", "curvature_max")? {
                cfg.curvature_max = v as i64;
            }
        }
        if let Some(b) = flags.bound {
            cfg.bound = b;
        }
        Ok(cfg)
    }
}

pub fn run_resonance(file: Option<&ConfigFile>, flags: &FlagOverrides) -> Result<RunManifest> {
    validate_file(file)?;
    let cfg = ResonanceConfig::from_sources(file, flags)?;
    let out = common_out(file, flags, "resonance");
    let mut rec = recorder("resonance", &out, json!({"resonance": cfg}), file)?;

    let quads = enumerate_resonances(cfg.bound)?;
    rec.write_output("resonance_zeros.csv", &quadruples_to_csv(&quads))?;

    // the known families must be present
    let b = cfg.bound as i64;
    let mut families_ok = true;
    for m in -b..=b {
        for n in -(b / 2)..=(b / 2) {
            families_ok &= quads
                .binary_search_by(|q| (q.m, q.m1, q.n, q.n1).cmp(&(m, 0, n, 2 * n)))
                .is_ok();
        }
    }
    rec.criterion(
        "zero_x_frequency_family_present",
        families_ok,
        format!("{} zeros within |.| <= {}", quads.len(), cfg.bound),
    );

    // expanded form vs definitional difference, exhaustively on the box
    let check_bound = cfg.bound.min(30) as i64;
    let mut identity_ok = true;
    'outer: for m in -check_bound..=check_bound {
        for m1 in -check_bound..=check_bound {
            for n in -check_bound..=check_bound {
                for n1 in -check_bound..=check_bound {
                    if resonance(m, m1, n, n1)? != resonance_definitional(m, m1, n, n1)? {
                        identity_ok = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    rec.criterion(
        "expanded_equals_definitional",
        identity_ok,
        format!("exhaustive on |.| <= {check_bound}"),
    );

    let mut curvature_ok = true;
    for m in 0..=cfg.curvature_max {
        let (a, bb) = curvature(m)?;
        curvature_ok &= a == -8 * m as i128 && bb == -8 * m as i128;
    }
    rec.criterion(
        "curvature_identity",
        curvature_ok,
        format!("m up to {}", cfg.curvature_max),
    );
    rec.finish()
}

