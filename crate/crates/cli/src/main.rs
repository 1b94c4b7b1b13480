use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vortexlab::scenario::{
    exit_code_for, parse_config, run_orbit_check, run_scenario, Overrides, RunKind, RunReport,
    ScenarioConfig,
};

/// Point-vortex, vortex-ring and membrane dynamics from JSON scenario files.
#[derive(Debug, Parser)]
#[command(name = "vortexlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the integration horizon.
    #[arg(long = "t-end", allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Override the integrator relative tolerance (absolute tolerance becomes 1% of it).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the configured model and write trajectory, events and drift report.
    Simulate(Common),
    /// Evaluate the orbit-equation residual along an existing trajectory file.
    OrbitCheck {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV; defaults to the configured trajectory file inside --out.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Stroboscopic sections of the restricted three-vortex problem.
    Poincare(Common),
    /// Run every grid point of the configured sweep in parallel.
    Sweep(Common),
    /// Compare the closed-form ring Green function with quadrature.
    Oracle(Common),
}


fn load(common: &Common) -> Result<ScenarioConfig, vortexlab::Error> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| vortexlab::Error::Io(format!("{}: {e}", common.config.display())))?;
    let overrides = Overrides {
        t_end: common.t_end,
        tol: common.tol,
        seed: common.seed,
    };
    parse_config(&text)?.with_overrides(&overrides)
}

fn summary(report: &RunReport) -> String {
    let d = &report.details;
    match report.command {
        RunKind::OrbitCheck => format!(
            "orbit-check ({}): max residual {:.3e} over {} rows (tolerance {:.1e}) -> {}",
            d["kind"].as_str().unwrap_or("?"),
            d["max_residual"].as_f64().unwrap_or(f64::NAN),
            d["rows"],
            d["tolerance"].as_f64().unwrap_or(f64::NAN),
            if d["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" },
        ),
        RunKind::Oracle => format!(
            "oracle: {} samples (seed {}), max rel diff {:.3e}, max gradient rel err {:.3e} -> {}",
            d["samples"],
            d["seed"],
            d["max_rel_diff"].as_f64().unwrap_or(f64::NAN),
            d["max_gradient_rel_err"].as_f64().unwrap_or(f64::NAN),
            if d["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" },
        ),
        _ => {
            let mut s = format!("{:?}: exit {}", report.command, report.exit_code).to_lowercase();
            if let Some(t) = &report.termination {
                s += &format!(", termination {}", serde_json::to_string(t).unwrap_or_default());
            }
            if let Some(drift) = &report.drift {
                for inv in &drift.invariants {
                    s += &format!(", {} drift {:.2e}", inv.name, inv.max_rel_drift);
                }
            }
            s
        }
    }
}

fn execute(cli: Cli) -> Result<RunReport, vortexlab::Error> {
    let (kind, common, trajectory) = match cli.command {
        Command::Simulate(c) => (RunKind::Simulate, c, None),
        Command::OrbitCheck { common, trajectory } => (RunKind::OrbitCheck, common, trajectory),
        Command::Poincare(c) => (RunKind::Poincare, c, None),
        Command::Sweep(c) => (RunKind::Sweep, c, None),
        Command::Oracle(c) => (RunKind::Oracle, c, None),
    };
    let cfg = load(&common)?;
    std::fs::create_dir_all(&common.out)
        .map_err(|e| vortexlab::Error::Io(format!("{}: {e}", common.out.display())))?;
    match kind {
        RunKind::OrbitCheck => run_orbit_check(&cfg, trajectory.as_deref(), &common.out),
        k => run_scenario(k, &cfg, Path::new(&common.out)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(report) => {
            println!("{}", summary(&report));
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code_for(&e);
            ExitCode::from(code as u8)
        }
    }
}
