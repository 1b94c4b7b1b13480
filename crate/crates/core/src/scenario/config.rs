//! Declarative run description parsed from a single JSON document.

use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane::{Normalization, Restricted3State, DEFAULT_OMEGA0};
use crate::integrate::events::EventThresholds;
use crate::integrate::{IntegratorSettings, Model};
use crate::membranes::SphereProductState;
use crate::rings::{Ring, RingSystem};
use crate::system::{Domain, VortexSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Plane,
    HalfPlane,
    Quadrant,
    Rings,
    Membrane,
    Restricted3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneConfig {
    pub a: f64,
    pub b: f64,
    pub m: NonZeroU32,
    pub l: NonZeroU32,
}

fn default_omega0() -> f64 {
    DEFAULT_OMEGA0
}

fn default_periods() -> usize {
    100
}

fn default_escape() -> f64 {
    crate::diagnostics::DEFAULT_ESCAPE_RADIUS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Restricted3Config {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    /// Number of forcing periods sampled by `poincare`.
    #[serde(default = "default_periods")]
    pub periods: usize,
    /// Extra starting points for `poincare`, each giving one orbit.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub initials: Vec<[f64; 2]>,
    /// `poincare` produces one section file per value; defaults to `[epsilon]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_escape")]
    pub escape_radius: f64,
}

impl Restricted3Config {
    pub fn state(&self) -> Restricted3State {
        Restricted3State {
            x: self.x,
            y: self.y,
            epsilon: self.epsilon,
            omega0: self.omega0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorConfig {
    /// Relative drift above which an invariant is reported as failing.
    pub drift_tol: f64,
    /// Largest orbit-equation residual `orbit-check` accepts.
    pub orbit_tol: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            drift_tol: 1e-8,
            orbit_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub trajectory: String,
    pub report: String,
    pub events: String,
    pub section: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            trajectory: "trajectory.csv".into(),
            report: "report.json".into(),
            events: "events.jsonl".into(),
            section: "section.csv".into(),
        }
    }
}

/// Grid over one configuration value addressed by a JSON pointer such as
/// `/restricted3/epsilon` or `/integrator/rel_tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub values: Vec<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { samples: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelTag,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strengths: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub positions: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tracers: Vec<bool>,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rings: Vec<Ring>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membrane: Option<MembraneConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restricted3: Option<Restricted3Config>,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub events: EventThresholds,
    #[serde(default)]
    pub monitor: MonitorConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub oracle: OracleConfig,
}

/// Parses and validates a configuration document.
///
/// Malformed JSON, unknown fields and type or range violations the schema
/// can express (such as `m = 0`) give [`Error::Schema`] with the location;
/// inconsistent physics (a vortex on the wall, coincident rings) gives the
/// corresponding validation error.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Schema {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config is always serializable")
}

/// The model and initial state a configuration describes.
pub enum InitialData {
    Vortices(VortexSystem),
    Rings(RingSystem),
    Membrane(SphereProductState),
    Restricted3(Restricted3State),
}

impl ScenarioConfig {
    /// Integrator settings with the configured event thresholds attached.
    pub fn settings(&self) -> IntegratorSettings {
        let mut s = self.integrator;
        s.events = self.events;
        s
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        let need = |what: &str| Error::Validation(format!("model {:?} requires `{what}`", self.model));
        let vortices = |domain| -> Result<InitialData> {
            if self.strengths.is_empty() {
                return Err(need("strengths"));
            }
            Ok(InitialData::Vortices(VortexSystem {
                domain,
                strengths: self.strengths.clone(),
                positions: self.positions.clone(),
                tracers: self.tracers.clone(),
            }))
        };
        match self.model {
            ModelTag::Plane => vortices(Domain::Plane),
            ModelTag::HalfPlane => vortices(Domain::HalfPlane),
            ModelTag::Quadrant => vortices(Domain::Quadrant),
            ModelTag::Rings => {
                if self.rings.is_empty() {
                    return Err(need("rings"));
                }
                Ok(InitialData::Rings(RingSystem::new(self.rings.clone())))
            }
            ModelTag::Membrane => {
                let m = self.membrane.ok_or_else(|| need("membrane"))?;
                Ok(InitialData::Membrane(SphereProductState {
                    a: m.a,
                    b: m.b,
                    m: m.m,
                    l: m.l,
                }))
            }
            ModelTag::Restricted3 => {
                let r = self.restricted3.as_ref().ok_or_else(|| need("restricted3"))?;
                Ok(InitialData::Restricted3(r.state()))
            }
        }
    }

    /// Model and flat initial state.
    pub fn model(&self) -> Result<(Model, Vec<f64>)> {
        match self.initial_data()? {
            InitialData::Vortices(s) => Model::from_vortices(&s, self.normalization),
            InitialData::Rings(s) => Model::from_rings(&s),
            InitialData::Membrane(s) => Model::from_membrane(&s),
            InitialData::Restricted3(s) => Model::from_restricted3(&s),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mismatch = |field: &str| {
            Err(Error::Validation(format!(
                "field `{field}` does not belong to model {:?}",
                self.model
            )))
        };
        let vortex_model = matches!(self.model, ModelTag::Plane | ModelTag::HalfPlane | ModelTag::Quadrant);
        if !vortex_model && (!self.strengths.is_empty() || !self.positions.is_empty()) {
            return mismatch("strengths/positions");
        }
        if self.model != ModelTag::Rings && !self.rings.is_empty() {
            return mismatch("rings");
        }
        if self.model != ModelTag::Membrane && self.membrane.is_some() {
            return mismatch("membrane");
        }
        if self.model != ModelTag::Restricted3 && self.restricted3.is_some() {
            return mismatch("restricted3");
        }
        if let Some(r) = &self.restricted3 {
            if r.periods == 0 {
                return Err(Error::Validation("restricted3.periods must be at least 1".into()));
            }
            if !(r.escape_radius > 0.0) {
                return Err(Error::Validation("restricted3.escape_radius must be positive".into()));
            }
            for &eps in &r.epsilons {
                if !(eps >= 0.0) {
                    return Err(Error::Validation("epsilons must be non-negative".into()));
                }
            }
            for p in &r.initials {
                r.state().at(p[0], p[1]).validate()?;
            }
        }
        if !(self.monitor.drift_tol > 0.0 && self.monitor.orbit_tol > 0.0) {
            return Err(Error::Validation("monitor tolerances must be positive".into()));
        }
        self.settings().validate().map_err(|e| Error::Validation(e.to_string()))?;
        self.model().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_plane_config() {
        let cfg = parse_config(r#"{"model":"plane","strengths":[1,1],"positions":[[1,0],[-1,0]]}"#).unwrap();
        assert_eq!(cfg.model, ModelTag::Plane);
        assert_eq!(cfg.integrator.rel_tol, 1e-10);
    }

    #[test]
    fn half_plane_on_wall_names_index() {
        let err = parse_config(r#"{"model":"half_plane","strengths":[1,1],"positions":[[0,1],[1,0]]}"#).unwrap_err();
        assert!(matches!(err, Error::DomainViolation { index: 1, .. }), "{err:?}");
        assert!(err.to_string().contains("vortex 1"));
    }

    #[test]
    fn membrane_zero_dimension_is_schema_error() {
        let err = parse_config(r#"{"model":"membrane","membrane":{"a":1,"b":1,"m":0,"l":2}}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn unknown_fields_and_mismatches() {
        assert!(matches!(
            parse_config(r#"{"model":"plane","strengths":[1],"positions":[[0,0]],"bogus":1}"#),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(
            parse_config(r#"{"model":"membrane","strengths":[1],"membrane":{"a":1,"b":1,"m":1,"l":1}}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_config(r#"{"model":"plane","strengths":[1],"positions":[[0,0]],"integrator":{"rel_tol":-1}}"#),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"model":"restricted3","restricted3":{"x":0.1,"y":0.2,"epsilon":0.01,"epsilons":[0,0.01]},
            "integrator":{"t_end":5,"sample_dt":null},"events":{"boundary":0.001},
            "sweep":{"parameter":"/restricted3/epsilon","values":[0,0.005]}}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(parse_config(&serialize_config(&cfg)).unwrap(), cfg);
    }
}
