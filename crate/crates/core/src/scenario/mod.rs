//! Scenario runs: a parsed configuration is turned into one of the run
//! kinds below, each of which writes its files into an output directory and
//! returns a [`RunReport`] carrying the process exit code.
//!
//! Exit codes: 0 success, 1 a check ran but failed (orbit residual, Green
//! function oracle), 2 invalid input, 3 integration failure, 4 I/O, 5 a
//! terminal event such as membrane collapse stopped the run.

pub mod config;
pub mod oracle;
pub mod output;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagnostics::poincare_sections;
use crate::error::{Error, Result};
use crate::halfplane::{
    orbit_relative_residual_generic, orbit_residual_dipole, ReducedDipoleOrbitParams,
    ReducedGenericOrbitParams,
};
use crate::integrate::events::Event;
use crate::integrate::{integrate, monitor_invariants, DriftReport, Model};
use crate::quadrant::trajectory_constant;
use crate::trajectory::{Termination, Trajectory};

pub use config::{parse_config, serialize_config, ModelTag, ScenarioConfig};
pub use oracle::{green_oracle_suite, OracleReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_EVENT_STOP: i32 = 5;

/// Exit code for a run that failed before producing a report.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::StepUnderflow { .. } | Error::OrbitEscaped { .. } | Error::SingularApproach { .. } => {
            EXIT_INTEGRATION
        }
        Error::EventStop { .. } => EXIT_EVENT_STOP,
        _ => EXIT_VALIDATION,
    }
}

fn exit_code_for_termination(t: &Termination) -> i32 {
    match t {
        Termination::Completed => EXIT_OK,
        Termination::EventStop { .. } => EXIT_EVENT_STOP,
        Termination::StepUnderflow { .. } | Termination::MaxSteps { .. } => EXIT_INTEGRATION,
    }
}

/// Command-line overrides applied on top of the file contents.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub t_end: Option<f64>,
    /// Integrator relative tolerance; the absolute tolerance is set to 1% of it.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl ScenarioConfig {
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(t) = o.t_end {
            self.integrator.t_end = t;
        }
        if let Some(tol) = o.tol {
            self.integrator.rel_tol = tol;
            self.integrator.abs_tol = 1e-2 * tol;
        }
        if let Some(seed) = o.seed {
            self.oracle.seed = seed;
        }
        self.validate()?;
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Simulate,
    OrbitCheck,
    Poincare,
    Sweep,
    Oracle,
}

/// Summary written as the report JSON of every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: RunKind,
    pub model: ModelTag,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftReport>,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub outputs: Vec<PathBuf>,
    /// Run-kind specific results.
    #[serde(default)]
    pub details: serde_json::Value,
}

/// Everything `simulate` produces, before it is written to disk.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub model: Model,
    pub trajectory: Trajectory,
    pub drift: DriftReport,
    pub warnings: Vec<String>,
}

/// Integrates the configured model without touching the file system.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Simulation> {
    let mut warnings = Vec::new();
    if let config::InitialData::Rings(rs) = cfg.initial_data()? {
        warnings.extend(rs.validate()?.iter().map(|w| format!("{w:?}")));
    }
    let (model, y0) = cfg.model()?;
    let trajectory = integrate(&model, &y0, &cfg.settings())?;
    let drift = monitor_invariants(&model, &trajectory, cfg.monitor.drift_tol);
    Ok(Simulation {
        model,
        trajectory,
        drift,
        warnings,
    })
}

/// `simulate`: trajectory CSV, event log and report.
pub fn run_simulate(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let sim = simulate(cfg)?;
    let traj_path = out.join(&cfg.outputs.trajectory);
    let events_path = out.join(&cfg.outputs.events);
    let report_path = out.join(&cfg.outputs.report);
    output::write_trajectory_csv(&traj_path, &sim.trajectory)?;
    output::write_events_jsonl(&events_path, &sim.trajectory.events)?;
    let report = RunReport {
        command: RunKind::Simulate,
        model: cfg.model,
        exit_code: exit_code_for_termination(&sim.trajectory.termination),
        termination: Some(sim.trajectory.termination.clone()),
        drift: Some(sim.drift),
        events: sim.trajectory.events.clone(),
        warnings: sim.warnings,
        outputs: vec![traj_path, events_path, report_path.clone()],
        details: json!({
            "samples": sim.trajectory.len(),
            "accepted_steps": sim.trajectory.accepted_steps,
            "rejected_steps": sim.trajectory.rejected_steps,
        }),
    };
    output::write_json(&report_path, &report)?;
    Ok(report)
}

/// Which orbit equation `orbit-check` evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitCheckKind {
    /// Non-dipole half-plane pair; residual relative to `e^{2πE}`.
    Generic,
    /// `(1, −1)` dipole; absolute residual of the level-set equation.
    Dipole,
    /// Quadrant vortex; `|C(t) − C(0)| / C(0)`.
    Quadrant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitCheck {
    pub kind: OrbitCheckKind,
    pub rows: usize,
    pub max_residual: f64,
    /// Time of the worst row.
    pub t_worst: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn columns(table: &output::Table, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    names
        .iter()
        .map(|n| {
            table
                .column(n)
                .ok_or_else(|| Error::Validation(format!("trajectory file has no column `{n}`")))
        })
        .collect()
}

/// Evaluates the conserved-orbit residual along a trajectory table.
///
/// The level-set parameters come from the first row, so the check measures
/// how well the stored trajectory stays on the orbit it started on.
pub fn orbit_check_table(cfg: &ScenarioConfig, table: &output::Table) -> Result<OrbitCheck> {
    let t = columns(table, &["t"])?.remove(0);
    if t.is_empty() {
        return Err(Error::Validation("trajectory file has no rows".into()));
    }
    let mut residuals = Vec::with_capacity(t.len());
    let kind = match cfg.model {
        ModelTag::HalfPlane => {
            let c = columns(table, &["x0", "y0", "x1", "y1"])?;
            let sys0 = match cfg.initial_data()? {
                config::InitialData::Vortices(s) => s,
                _ => unreachable!("half-plane config holds vortices"),
            };
            if sys0.len() != 2 {
                return Err(Error::WrongArity {
                    expected: 2,
                    found: sys0.len(),
                });
            }
            let first = sys0.with_flat_positions(&[c[0][0], c[1][0], c[2][0], c[3][0]]);
            if first.strengths[0] + first.strengths[1] == 0.0 {
                let p = ReducedDipoleOrbitParams::from_system(&first)?;
                for k in 0..t.len() {
                    let y0 = 0.5 * (c[1][k] + c[3][k]);
                    residuals.push(orbit_residual_dipole(c[0][k] - c[2][k], y0, &p)?.abs());
                }
                OrbitCheckKind::Dipole
            } else {
                let p = ReducedGenericOrbitParams::from_system(&first)?;
                for k in 0..t.len() {
                    let r = orbit_relative_residual_generic(c[0][k] - c[2][k], c[1][k] - c[3][k], &p)?;
                    residuals.push(r.abs());
                }
                OrbitCheckKind::Generic
            }
        }
        ModelTag::Quadrant => {
            let c = columns(table, &["x", "y"])?;
            let c0 = trajectory_constant(c[0][0], c[1][0])?;
            for k in 0..t.len() {
                residuals.push((trajectory_constant(c[0][k], c[1][k])? - c0).abs() / c0);
            }
            OrbitCheckKind::Quadrant
        }
        other => {
            return Err(Error::Validation(format!(
                "orbit-check supports half_plane pairs and quadrant runs, not {other:?}"
            )))
        }
    };
    let (k_worst, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (k, r)| if r > acc.1 || r.is_nan() { (k, r) } else { acc });
    Ok(OrbitCheck {
        kind,
        rows: t.len(),
        max_residual,
        t_worst: t[k_worst],
        tolerance: cfg.monitor.orbit_tol,
        pass: max_residual < cfg.monitor.orbit_tol,
    })
}

/// `orbit-check`: reads `trajectory` (by default the configured trajectory
/// file inside `out`) and writes `orbit_check.json`.
pub fn run_orbit_check(cfg: &ScenarioConfig, trajectory: Option<&Path>, out: &Path) -> Result<RunReport> {
    let path = trajectory
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.join(&cfg.outputs.trajectory));
    let table = output::read_csv_table(&path)?;
    let check = orbit_check_table(cfg, &table)?;
    let report_path = out.join("orbit_check.json");
    let report = RunReport {
        command: RunKind::OrbitCheck,
        model: cfg.model,
        exit_code: if check.pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        termination: None,
        drift: None,
        events: Vec::new(),
        warnings: Vec::new(),
        outputs: vec![report_path.clone()],
        details: serde_json::to_value(&check).expect("serializable"),
    };
    output::write_json(&report_path, &report)?;
    Ok(report)
}

fn section_path(out: &Path, name: &str, index: usize, count: usize) -> PathBuf {
    if count == 1 {
        return out.join(name);
    }
    let p = Path::new(name);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("section");
    let ext = p.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.join(format!("{stem}_{index}.{ext}"))
}

/// `poincare`: one section file per configured `ε`, each holding every
/// starting point's orbit. Orbits that fail (singular approach, escape
/// before the first section) are listed in the report and make the exit
/// code 3.
pub fn run_poincare(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let r3 = cfg
        .restricted3
        .as_ref()
        .ok_or_else(|| Error::Validation("poincare needs a restricted3 model".into()))?;
    let epsilons = if r3.epsilons.is_empty() { vec![r3.epsilon] } else { r3.epsilons.clone() };
    let mut starts = vec![[r3.x, r3.y]];
    starts.extend(r3.initials.iter().copied());
    let settings = cfg.settings();
    let mut outputs = Vec::new();
    let mut per_eps = Vec::new();
    let mut failed = false;
    for (e_idx, &eps) in epsilons.iter().enumerate() {
        let states: Vec<_> = starts
            .iter()
            .map(|p| {
                let mut st = r3.state().at(p[0], p[1]);
                st.epsilon = eps;
                st
            })
            .collect();
        let results = poincare_sections(&states, r3.periods, &settings, r3.escape_radius);
        let mut ok = Vec::new();
        let mut orbits = Vec::new();
        for (i, res) in results.into_iter().enumerate() {
            match res {
                Ok(sec) => {
                    orbits.push(json!({
                        "orbit": i,
                        "start": starts[i],
                        "points": sec.points.len(),
                        "escaped_at": sec.escaped_at,
                        "max_dH0": sec.max_h0_deviation()?,
                    }));
                    ok.push((i, sec));
                }
                Err(e) => {
                    failed = true;
                    orbits.push(json!({"orbit": i, "start": starts[i], "error": e.to_string()}));
                }
            }
        }
        let path = section_path(out, &cfg.outputs.section, e_idx, epsilons.len());
        output::write_section_csv(&path, &ok)?;
        per_eps.push(json!({"epsilon": eps, "file": path, "orbits": orbits}));
        outputs.push(path);
    }
    let report_path = out.join(&cfg.outputs.report);
    outputs.push(report_path.clone());
    let report = RunReport {
        command: RunKind::Poincare,
        model: cfg.model,
        exit_code: if failed { EXIT_INTEGRATION } else { EXIT_OK },
        termination: None,
        drift: None,
        events: Vec::new(),
        warnings: Vec::new(),
        outputs,
        details: json!({ "period": r3.state().period(), "periods": r3.periods, "sections": per_eps }),
    };
    output::write_json(&report_path, &report)?;
    Ok(report)
}

/// Configurations of a sweep, one per grid value, each validated.
pub fn sweep_configs(cfg: &ScenarioConfig) -> Result<Vec<ScenarioConfig>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Validation("sweep needs a `sweep` block".into()))?;
    if sweep.values.is_empty() {
        return Err(Error::Validation("sweep.values is empty".into()));
    }
    if sweep.parameter == "/restricted3/epsilon" && cfg.restricted3.as_ref().is_some_and(|r| !r.epsilons.is_empty()) {
        return Err(Error::Validation(
            "restricted3.epsilons would override the swept epsilon; remove one of them".into(),
        ));
    }
    let mut base = serde_json::to_value(cfg).expect("config is serializable");
    base.as_object_mut().expect("config is an object").remove("sweep");
    sweep
        .values
        .iter()
        .map(|v| {
            let mut doc = base.clone();
            let slot = doc.pointer_mut(&sweep.parameter).ok_or_else(|| {
                Error::Validation(format!("sweep parameter `{}` does not address a config field", sweep.parameter))
            })?;
            *slot = v.clone();
            let c: ScenarioConfig = serde_json::from_value(doc).map_err(|e| Error::Schema {
                message: format!("sweep value {v}: {e}"),
                line: 0,
                column: 0,
            })?;
            c.validate()?;
            Ok(c)
        })
        .collect()
}

/// `sweep`: runs every grid point in parallel into `out/run_<k>`; restricted
/// three-vortex configurations produce sections, everything else a
/// simulation. The sweep's exit code is the largest of its runs.
pub fn run_sweep(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let configs = sweep_configs(cfg)?;
    let sweep = cfg.sweep.as_ref().expect("checked by sweep_configs");
    let runs: Vec<serde_json::Value> = configs
        .par_iter()
        .enumerate()
        .map(|(k, c)| {
            let dir = out.join(format!("run_{k:03}"));
            let res = if c.model == ModelTag::Restricted3 {
                run_poincare(c, &dir)
            } else {
                run_simulate(c, &dir)
            };
            match res {
                Ok(r) => json!({"index": k, "value": sweep.values[k], "dir": dir, "exit_code": r.exit_code}),
                Err(e) => json!({
                    "index": k, "value": sweep.values[k], "dir": dir,
                    "exit_code": exit_code_for(&e), "error": e.to_string(),
                }),
            }
        })
        .collect();
    let exit_code = runs
        .iter()
        .filter_map(|r| r["exit_code"].as_i64())
        .max()
        .unwrap_or(0) as i32;
    let report_path = out.join(&cfg.outputs.report);
    let report = RunReport {
        command: RunKind::Sweep,
        model: cfg.model,
        exit_code,
        termination: None,
        drift: None,
        events: Vec::new(),
        warnings: Vec::new(),
        outputs: vec![report_path.clone()],
        details: json!({"parameter": sweep.parameter, "runs": runs}),
    };
    output::write_json(&report_path, &report)?;
    Ok(report)
}

/// `oracle`: the seeded Green-function comparison suite, written to
/// `oracle.json`.
pub fn run_oracle(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let rep = green_oracle_suite(cfg.oracle.samples, cfg.oracle.seed)?;
    let path = out.join("oracle.json");
    let report = RunReport {
        command: RunKind::Oracle,
        model: cfg.model,
        exit_code: if rep.pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        termination: None,
        drift: None,
        events: Vec::new(),
        warnings: Vec::new(),
        outputs: vec![path.clone()],
        details: serde_json::to_value(&rep).expect("serializable"),
    };
    output::write_json(&path, &report)?;
    Ok(report)
}

/// Dispatches one run kind.
pub fn run_scenario(kind: RunKind, cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    match kind {
        RunKind::Simulate => run_simulate(cfg, out),
        RunKind::OrbitCheck => run_orbit_check(cfg, None, out),
        RunKind::Poincare => run_poincare(cfg, out),
        RunKind::Sweep => run_sweep(cfg, out),
        RunKind::Oracle => run_oracle(cfg, out),
    }
}
