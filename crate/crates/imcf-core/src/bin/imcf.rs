//! Command-line driver: integrate the motion, verify invariants, compare
//! against the exact round solution, and run the geometry self-audits.
//!
//! Exit codes: 0 success, 2 monitor/check failure, 3 singularity guard,
//! 4 configuration or input error, 1 internal inconsistency.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use imcf_core::config::FlowConfig;
use imcf_core::discretization::Grid;
use imcf_core::flow::{self, FlowMode, InitialData};
use imcf_core::monitors::{self, round_solution, InvariantReport};
use imcf_core::{geometry_checks, output, Error, Result};

#[derive(Parser)]
#[command(
    name = "imcf",
    version,
    about = "Inverse-mean-curvature motion of spacelike graphs over a hyperbolic cap",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the raw motion (the radius contracts like e^{-t/n}).
    Run(CommonArgs),
    /// Integrate the rescaled motion (converges to a constant radius).
    RunRescaled(CommonArgs),
    /// Run the full monitor suite on fresh runs or a stored trajectory.
    Verify(VerifyArgs),
    /// Evolve constant data and compare against the exact round solution.
    OracleCompare(CommonArgs),
    /// Run the randomized geometry self-audit suites.
    GeometryCheck(GeometryArgs),
}

/// Configuration flags shared by every run-like subcommand.  Each config
/// key has a flag of the same name (underscores become dashes); flags
/// override file values, which override defaults.
#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Grid kind: radial | disk.
    #[arg(long)]
    mode: Option<String>,
    /// Cap dimension (the moving hypersurface is n-dimensional).
    #[arg(long)]
    n: Option<String>,
    /// Geodesic radius of the cap boundary.
    #[arg(long)]
    rho_max: Option<String>,
    /// Radial cell count.
    #[arg(long)]
    cells: Option<String>,
    /// Angular cell count (disk mode).
    #[arg(long)]
    cells_theta: Option<String>,
    /// Initial data: constant:R | bump:R,EPS.
    #[arg(long)]
    u0: Option<String>,
    /// Gauge constant choice: midpoint | value:<c>.
    #[arg(long)]
    c_convention: Option<String>,
    /// Parabolic step-budget factor in (0, 0.5].
    #[arg(long)]
    cfl_gamma: Option<String>,
    /// Fixed time step, or 'auto'.
    #[arg(long)]
    dt: Option<String>,
    /// End time of the raw motion.
    #[arg(long)]
    t_end: Option<String>,
    /// End time of the rescaled motion.
    #[arg(long)]
    t_end_rescaled: Option<String>,
    /// Record a trajectory row every this many steps.
    #[arg(long)]
    csv_every: Option<String>,
    /// Write a snapshot every this many steps (0 = final only).
    #[arg(long)]
    snapshot_every: Option<String>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long, help = "Radius-sandwich tolerance, or 'auto'")]
    tol_c0: Option<String>,
    #[arg(long, help = "Log-speed bracket tolerance, or 'auto'")]
    tol_phidot: Option<String>,
    #[arg(long, help = "Gradient-monotonicity tolerance, or 'auto'")]
    tol_gradient: Option<String>,
    #[arg(long, help = "Area-law tolerance")]
    tol_area: Option<String>,
    #[arg(long, help = "Rescaled-area drift tolerance")]
    tol_rescaled_area: Option<String>,
    #[arg(long, help = "Convergence oscillation threshold")]
    tol_conv: Option<String>,
    #[arg(long, help = "Limit-radius identity tolerance")]
    tol_rinf: Option<String>,
    #[arg(long, help = "Ceiling for the scale-invariant curvature H*Theta")]
    h_theta_ceiling: Option<String>,
    #[arg(long, help = "Spacelike guard threshold on v^2")]
    eps_spacelike: Option<String>,
    #[arg(long, help = "Mean-convexity guard threshold on H")]
    eps_mean_convex: Option<String>,
    #[arg(long, help = "Oracle-comparison threshold")]
    oracle_tol: Option<String>,
    /// Extra KEY=VALUE overrides, applied after the dedicated flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonArgs {
    fn build_config(&self) -> Result<FlowConfig> {
        let mut cfg = match &self.config {
            Some(path) => FlowConfig::from_file(path)?,
            None => FlowConfig::default(),
        };
        let overrides: [(&str, &Option<String>); 25] = [
            ("mode", &self.mode),
            ("n", &self.n),
            ("rho_max", &self.rho_max),
            ("cells", &self.cells),
            ("cells_theta", &self.cells_theta),
            ("u0", &self.u0),
            ("c_convention", &self.c_convention),
            ("cfl_gamma", &self.cfl_gamma),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("t_end_rescaled", &self.t_end_rescaled),
            ("csv_every", &self.csv_every),
            ("snapshot_every", &self.snapshot_every),
            ("out_dir", &self.out_dir),
            ("tol_c0", &self.tol_c0),
            ("tol_phidot", &self.tol_phidot),
            ("tol_gradient", &self.tol_gradient),
            ("tol_area", &self.tol_area),
            ("tol_rescaled_area", &self.tol_rescaled_area),
            ("tol_conv", &self.tol_conv),
            ("tol_rinf", &self.tol_rinf),
            ("h_theta_ceiling", &self.h_theta_ceiling),
            ("eps_spacelike", &self.eps_spacelike),
            ("eps_mean_convex", &self.eps_mean_convex),
            ("oracle_tol", &self.oracle_tol),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.apply_key(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.apply_key(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Check a stored trajectory CSV instead of running fresh legs.
    /// The config must describe the grid that produced it.
    #[arg(long, value_name = "PATH")]
    trajectory: Option<PathBuf>,
    /// Which motion produced the stored trajectory: raw | rescaled.
    #[arg(long, default_value = "raw")]
    trajectory_mode: String,
}

#[derive(Args)]
struct GeometryArgs {
    /// Cap dimension to audit (default: both 2 and 3).
    #[arg(long)]
    n: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run(common) => cmd_run(&common, FlowMode::Raw),
        Cmd::RunRescaled(common) => cmd_run(&common, FlowMode::Rescaled),
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::OracleCompare(common) => cmd_oracle_compare(&common),
        Cmd::GeometryCheck(args) => cmd_geometry_check(&args),
    }
}

/// Integrate one motion, writing trajectory.csv, snapshots, config.resolved
/// and report.txt into the output directory.
fn cmd_run(common: &CommonArgs, mode: FlowMode) -> Result<()> {
    let cfg = common.build_config()?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    output::write_resolved_config(&cfg.out_dir.join("config.resolved"), &cfg)?;

    let snap_dir = cfg.out_dir.clone();
    let report = flow::evolve_with(&cfg, mode, |step, state| {
        output::write_snapshot(&snap_dir.join(format!("snapshot_{step:08}.csv")), state)
    })?;
    let traj_path = cfg.out_dir.join("trajectory.csv");
    output::write_trajectory(&traj_path, &report.records)?;

    if let Some(err) = report.failure {
        eprintln!(
            "run halted after {} steps at t = {:.9e}; partial trajectory kept in {}",
            report.steps,
            report.state.t,
            traj_path.display()
        );
        return Err(err);
    }

    output::write_snapshot(&cfg.out_dir.join("snapshot_final.csv"), &report.state)?;

    let grid = report.state.grid();
    let ctx = cfg.monitor_context(mode, grid.cap_area(), grid.h);
    let inv = monitors::check_trajectory(&report.records, &ctx)?;
    let rendered = inv.render();
    std::fs::write(cfg.out_dir.join("report.txt"), &rendered)?;

    println!(
        "{mode} motion on a {} grid: n = {}, cells = {}, steps = {}, final t = {:.6e}, c = {:.9e}",
        cfg.mode, cfg.n, cfg.cells, report.steps, report.state.t, report.state.c
    );
    println!("wrote {}", traj_path.display());
    print!("{rendered}");

    if !inv.all_passed() {
        return Err(Error::Monitor(format!(
            "{} of {} checks failed (see report above)",
            inv.failures().count(),
            inv.checks.len()
        )));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let cfg = args.common.build_config()?;
    match &args.trajectory {
        Some(path) => verify_stored(&cfg, path, &args.trajectory_mode),
        None => verify_fresh(&cfg),
    }
}

/// Replay the monitors over a stored trajectory CSV.
fn verify_stored(cfg: &FlowConfig, path: &std::path::Path, mode_str: &str) -> Result<()> {
    let mode: FlowMode = mode_str.parse()?;
    let records = output::read_trajectory(path)?;
    let grid = Grid::build(cfg.mode, cfg.n, cfg.rho_max, cfg.cells, cfg.cells_theta)?;
    let ctx = cfg.monitor_context(mode, grid.cap_area(), grid.h);
    let inv = monitors::check_trajectory(&records, &ctx)?;
    let rendered = inv.render();
    println!(
        "stored trajectory {} ({} rows, {mode} motion)",
        path.display(),
        records.len()
    );
    print!("{rendered}");
    finish_verify(&[inv])
}

/// Run both motions fresh and check every monitor on each leg.
fn verify_fresh(cfg: &FlowConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    output::write_resolved_config(&cfg.out_dir.join("config.resolved"), cfg)?;

    let mut combined = String::new();
    let mut reports = Vec::new();
    for (mode, file) in [
        (FlowMode::Raw, "trajectory_raw.csv"),
        (FlowMode::Rescaled, "trajectory_rescaled.csv"),
    ] {
        let out = flow::evolve(cfg, mode)?;
        output::write_trajectory(&cfg.out_dir.join(file), &out.records)?;
        let grid = out.state.grid();
        let ctx = cfg.monitor_context(mode, grid.cap_area(), grid.h);
        let inv = monitors::check_trajectory(&out.records, &ctx)?;
        combined.push_str(&format!("== {mode} leg ({} steps) ==\n", out.steps));
        combined.push_str(&inv.render());
        reports.push(inv);
    }
    std::fs::write(cfg.out_dir.join("report.txt"), &combined)?;
    print!("{combined}");
    finish_verify(&reports)
}

fn finish_verify(reports: &[InvariantReport]) -> Result<()> {
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    if failed > 0 {
        Err(Error::Monitor(format!("{failed} check(s) failed")))
    } else {
        println!("verify: all checks passed");
        Ok(())
    }
}

/// Evolve constant initial data and compare every recorded time against the
/// exact homothetic solution.
fn cmd_oracle_compare(common: &CommonArgs) -> Result<()> {
    let cfg = common.build_config()?;
    let InitialData::Constant { r0 } = cfg.u0 else {
        return Err(Error::Config(
            "oracle-compare requires constant initial data (u0 = constant:R)".to_string(),
        ));
    };
    let out = flow::evolve(&cfg, FlowMode::Raw)?;
    let mut worst = 0.0f64;
    let mut worst_t = 0.0;
    for r in &out.records {
        let exact = round_solution(r0, cfg.n, r.t).u;
        let err = ((r.min_u - exact).abs()).max((r.max_u - exact).abs()) / exact;
        if err > worst {
            worst = err;
            worst_t = r.t;
        }
    }
    // Full-field comparison at the end time.
    let exact_end = round_solution(r0, cfg.n, out.state.t).u;
    let mut worst_field = 0.0f64;
    for &v in out.state.u.interior() {
        worst_field = worst_field.max((v - exact_end).abs() / exact_end);
    }
    println!(
        "oracle comparison: {} recorded times over {} steps (t_end = {:.6e})",
        out.records.len(),
        out.steps,
        out.state.t
    );
    println!(
        "max relative error vs exact round solution: {worst:.6e} (worst at t = {worst_t:.6e})"
    );
    println!("max relative error over the final field:    {worst_field:.6e}");
    let bound = cfg.oracle_tol;
    if worst <= bound && worst_field <= bound {
        println!("oracle-compare: PASS (threshold {bound:.3e})");
        Ok(())
    } else {
        Err(Error::Monitor(format!(
            "oracle deviation exceeds {bound:.3e}"
        )))
    }
}

/// Run the randomized geometry audits and print one line per check.
fn cmd_geometry_check(args: &GeometryArgs) -> Result<()> {
    let dims = match args.n {
        Some(n) => vec![n],
        None => vec![2, 3],
    };
    let mut failed = 0usize;
    let mut total = 0usize;
    for n in dims {
        println!("geometry audit, n = {n}:");
        for check in geometry_checks::run_all(n) {
            total += 1;
            let status = if check.pass {
                "PASS"
            } else {
                failed += 1;
                "FAIL"
            };
            println!(
                "[{status}] {:<28} worst {:>12.6e}  (tol {:.1e})",
                check.name, check.worst, check.tol
            );
        }
    }
    if failed > 0 {
        Err(Error::Monitor(format!(
            "{failed} of {total} geometry checks failed"
        )))
    } else {
        println!("geometry-check: all {total} checks passed");
        Ok(())
    }
}
