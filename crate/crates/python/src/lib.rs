//! Python bindings: vortex systems, Hamiltonians and velocities, ring Green
//! functions, closed forms, and whole scenario runs driven by JSON configs.

use std::path::Path;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vortexlab::diagnostics;
use vortexlab::halfplane::{self, Normalization, ReducedDipoleOrbitParams, ReducedGenericOrbitParams, Restricted3State};
use vortexlab::integrate::{integrate, monitor_invariants};
use vortexlab::scenario::{self, Overrides, RunKind};
use vortexlab::{membranes, planar, quadrant, rings, system, Domain};

create_exception!(pyvortexlab, VortexError, PyException, "Error raised by the vortexlab core.");

fn err(e: vortexlab::Error) -> PyErr {
    VortexError::new_err(e.to_string())
}

fn parse_domain(s: &str) -> PyResult<Domain> {
    match s {
        "plane" => Ok(Domain::Plane),
        "half_plane" => Ok(Domain::HalfPlane),
        "quadrant" => Ok(Domain::Quadrant),
        other => Err(VortexError::new_err(format!(
            "unknown domain `{other}` (expected plane, half_plane or quadrant)"
        ))),
    }
}

fn parse_normalization(s: &str) -> PyResult<Normalization> {
    match s {
        "verbatim" => Ok(Normalization::Verbatim),
        "green_function" => Ok(Normalization::GreenFunction),
        other => Err(VortexError::new_err(format!("unknown normalization `{other}`"))),
    }
}

/// Point vortices in the plane, the upper half-plane or the first quadrant.
#[pyclass(name = "VortexSystem", module = "pyvortexlab", skip_from_py_object)]
#[derive(Clone)]
struct PyVortexSystem {
    inner: system::VortexSystem,
}

#[pymethods]
impl PyVortexSystem {
    #[new]
    #[pyo3(signature = (domain, strengths, positions, tracers=None))]
    fn new(domain: &str, strengths: Vec<f64>, positions: Vec<[f64; 2]>, tracers: Option<Vec<bool>>) -> PyResult<Self> {
        let mut inner = system::VortexSystem::new(parse_domain(domain)?, strengths, positions);
        if let Some(t) = tracers {
            inner.tracers = t;
        }
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn domain(&self) -> &'static str {
        match self.inner.domain {
            Domain::Plane => "plane",
            Domain::HalfPlane => "half_plane",
            Domain::Quadrant => "quadrant",
        }
    }

    #[getter]
    fn strengths(&self) -> Vec<f64> {
        self.inner.strengths.clone()
    }

    #[getter]
    fn positions(&self) -> Vec<[f64; 2]> {
        self.inner.positions.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "VortexSystem(domain={:?}, strengths={:?}, positions={:?})",
            self.domain(),
            self.inner.strengths,
            self.inner.positions
        )
    }

    /// Same strengths at new positions.
    fn with_positions(&self, positions: Vec<[f64; 2]>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.positions = positions;
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[pyo3(signature = (normalization="verbatim"))]
    fn hamiltonian(&self, normalization: &str) -> PyResult<f64> {
        let s = &self.inner;
        match s.domain {
            Domain::Plane => planar::hamiltonian_plane(s),
            Domain::HalfPlane => halfplane::hamiltonian_halfplane_with(s, parse_normalization(normalization)?),
            Domain::Quadrant => {
                let [x, y] = s.positions[0];
                quadrant::hamiltonian_quadrant(s.strengths[0], x, y)
            }
        }
        .map_err(err)
    }

    #[pyo3(signature = (normalization="verbatim"))]
    fn gradient(&self, normalization: &str) -> PyResult<Vec<[f64; 2]>> {
        let s = &self.inner;
        match s.domain {
            Domain::Plane => planar::hamiltonian_plane_gradient(s),
            Domain::HalfPlane => {
                halfplane::hamiltonian_halfplane_gradient_with(s, parse_normalization(normalization)?)
            }
            Domain::Quadrant => {
                let [x, y] = s.positions[0];
                quadrant::hamiltonian_quadrant_gradient(s.strengths[0], x, y).map(|g| vec![g])
            }
        }
        .map_err(err)
    }

    #[pyo3(signature = (normalization="verbatim"))]
    fn velocity(&self, normalization: &str) -> PyResult<Vec<[f64; 2]>> {
        let s = &self.inner;
        match s.domain {
            Domain::Plane => planar::velocity_plane(s),
            Domain::HalfPlane => halfplane::velocity_halfplane_with(s, parse_normalization(normalization)?),
            Domain::Quadrant => {
                let [x, y] = s.positions[0];
                quadrant::velocity_quadrant(s.strengths[0], x, y).map(|v| vec![v])
            }
        }
        .map_err(err)
    }

    /// Plane moments `{"Q", "P", "I"}`.
    fn plane_moments<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = system::plane_invariants(&self.inner);
        let d = PyDict::new(py);
        d.set_item("Q", m.q)?;
        d.set_item("P", m.p)?;
        d.set_item("I", m.i)?;
        Ok(d)
    }

    /// Integrates the system to `t_end` and returns the sampled trajectory.
    #[pyo3(signature = (t_end, sample_dt=0.1, rel_tol=1e-10, abs_tol=1e-12, normalization="verbatim"))]
    fn integrate<'py>(
        &self,
        py: Python<'py>,
        t_end: f64,
        sample_dt: Option<f64>,
        rel_tol: f64,
        abs_tol: f64,
        normalization: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let (model, y0) =
            vortexlab::integrate::Model::from_vortices(&self.inner, parse_normalization(normalization)?).map_err(err)?;
        let set = vortexlab::integrate::IntegratorSettings::default()
            .with_t_end(t_end)
            .with_tol(rel_tol, abs_tol)
            .with_sample_dt(sample_dt);
        let tr = integrate(&model, &y0, &set).map_err(err)?;
        let drift = monitor_invariants(&model, &tr, 1e-8);
        trajectory_dict(py, &tr, Some(&drift))
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn trajectory_dict<'py>(
    py: Python<'py>,
    tr: &vortexlab::Trajectory,
    drift: Option<&vortexlab::integrate::DriftReport>,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("times", tr.times.clone())?;
    d.set_item("states", tr.states.clone())?;
    d.set_item("state_names", tr.state_names.clone())?;
    d.set_item("invariant_names", tr.invariant_names.clone())?;
    d.set_item("invariants", tr.invariants.clone())?;
    d.set_item("termination", json(&tr.termination))?;
    d.set_item("events", tr.events.iter().map(json).collect::<Vec<_>>())?;
    if let Some(r) = drift {
        d.set_item("drift", json(r))?;
    }
    Ok(d)
}

/// Ring Green function by adaptive quadrature (the oracle).
#[pyfunction]
fn green_ring(z: f64, r: f64, zp: f64, rp: f64) -> PyResult<f64> {
    rings::green_ring(z, r, zp, rp).map_err(err)
}

/// Ring Green function from complete elliptic integrals.
#[pyfunction]
fn green_ring_fast(z: f64, r: f64, zp: f64, rp: f64) -> PyResult<f64> {
    rings::green_ring_fast(z, r, zp, rp).map_err(err)
}

/// `(dG/dz, dG/dr)` from complete elliptic integrals.
#[pyfunction]
fn green_ring_grad_fast(z: f64, r: f64, zp: f64, rp: f64) -> PyResult<[f64; 2]> {
    rings::green_ring_grad_fast(z, r, zp, rp).map_err(err)
}

/// Hamiltonian of coaxial rings given as `(z, r, gamma, a)` tuples.
#[pyfunction]
fn hamiltonian_rings(rings_in: Vec<(f64, f64, f64, f64)>) -> PyResult<f64> {
    let sys = rings::RingSystem::new(
        rings_in
            .into_iter()
            .map(|(z, r, gamma, a)| rings::Ring { z, r, gamma, a })
            .collect(),
    );
    sys.validate().map_err(err)?;
    rings::hamiltonian_rings(&sys).map_err(err)
}

/// `(a(t), b(t))` of a shrinking sphere product `S^m(a) x S^l(b)`.
#[pyfunction]
fn membrane_closed_form(a0: f64, b0: f64, m: u32, l: u32, t: f64) -> PyResult<[f64; 2]> {
    membranes::membrane_closed_form(a0, b0, m, l, t).map_err(err)
}

#[pyfunction]
fn membrane_collapse_time(a0: f64, b0: f64, m: u32, l: u32) -> Option<f64> {
    membranes::collapse_time(a0, b0, m, l)
}

/// Residual of the dipole orbit equation at relative abscissa `x_r` and
/// center height `y0`, for `C = exp(-2 pi E)`.
#[pyfunction]
fn orbit_residual_dipole(x_r: f64, y0: f64, nu: f64, energy: f64) -> PyResult<f64> {
    halfplane::orbit_residual_dipole(x_r, y0, &ReducedDipoleOrbitParams { nu, energy }).map_err(err)
}

/// Orbit-equation residual of a non-dipole pair, relative to `exp(2 pi E)`.
#[pyfunction]
fn orbit_relative_residual_generic(x_r: f64, y_r: f64, mu: f64, energy: f64, strengths: [f64; 2]) -> PyResult<f64> {
    halfplane::orbit_relative_residual_generic(x_r, y_r, &ReducedGenericOrbitParams { mu, energy, strengths })
        .map_err(err)
}

/// Conserved quantity `2xy / sqrt(x^2 + y^2)` of the quadrant vortex.
#[pyfunction]
fn quadrant_trajectory_constant(x: f64, y: f64) -> PyResult<f64> {
    quadrant::trajectory_constant(x, y).map_err(err)
}

/// Stroboscopic section points of the restricted three-vortex problem.
#[pyfunction]
#[pyo3(signature = (x, y, epsilon, periods, escape_radius=10.0))]
fn poincare_section(x: f64, y: f64, epsilon: f64, periods: usize, escape_radius: f64) -> PyResult<Vec<[f64; 2]>> {
    let set = vortexlab::integrate::IntegratorSettings::default().with_tol(1e-11, 1e-13);
    diagnostics::poincare_section(&Restricted3State::new(x, y, epsilon), periods, &set, escape_radius)
        .map(|s| s.points)
        .map_err(err)
}

/// Validates a JSON scenario config and returns it in normalized form.
#[pyfunction]
fn parse_config(text: &str) -> PyResult<String> {
    scenario::parse_config(text).map(|c| scenario::serialize_config(&c)).map_err(err)
}

/// Integrates a JSON scenario config in memory.
#[pyfunction]
#[pyo3(signature = (config, t_end=None, tol=None))]
fn simulate<'py>(py: Python<'py>, config: &str, t_end: Option<f64>, tol: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = scenario::parse_config(config)
        .and_then(|c| c.with_overrides(&Overrides { t_end, tol, seed: None }))
        .map_err(err)?;
    let sim = scenario::simulate(&cfg).map_err(err)?;
    trajectory_dict(py, &sim.trajectory, Some(&sim.drift))
}

/// Runs `command` (simulate, orbit-check, poincare, sweep, oracle) exactly as
/// the command-line tool does; returns `(exit_code, report_json)`.
#[pyfunction]
#[pyo3(signature = (command, config, out_dir, seed=None))]
fn run(command: &str, config: &str, out_dir: &str, seed: Option<u64>) -> PyResult<(i32, String)> {
    let kind = match command {
        "simulate" => RunKind::Simulate,
        "orbit-check" => RunKind::OrbitCheck,
        "poincare" => RunKind::Poincare,
        "sweep" => RunKind::Sweep,
        "oracle" => RunKind::Oracle,
        other => return Err(VortexError::new_err(format!("unknown command `{other}`"))),
    };
    let cfg = scenario::parse_config(config)
        .and_then(|c| c.with_overrides(&Overrides { seed, ..Default::default() }))
        .map_err(err)?;
    match scenario::run_scenario(kind, &cfg, Path::new(out_dir)) {
        Ok(rep) => Ok((rep.exit_code, json(&rep))),
        Err(e) => Ok((scenario::exit_code_for(&e), json(&serde_json::json!({"error": e.to_string()})))),
    }
}

#[pymodule]
fn pyvortexlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VortexError", m.py().get_type::<VortexError>())?;
    m.add_class::<PyVortexSystem>()?;
    m.add_function(wrap_pyfunction!(green_ring, m)?)?;
    m.add_function(wrap_pyfunction!(green_ring_fast, m)?)?;
    m.add_function(wrap_pyfunction!(green_ring_grad_fast, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_rings, m)?)?;
    m.add_function(wrap_pyfunction!(membrane_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(membrane_collapse_time, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_residual_dipole, m)?)?;
    m.add_function(wrap_pyfunction!(orbit_relative_residual_generic, m)?)?;
    m.add_function(wrap_pyfunction!(quadrant_trajectory_constant, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_section, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
