//! Adaptive integration of any [`Model`] with dense sampling, invariant
//! recording and threshold events.

pub mod dop853;
pub mod events;
pub mod model;
pub mod monitor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Termination, Trajectory};
use dop853::{Dop853, OdeRhs};
use events::{event_functions, refine, Event, EventKind, EventThresholds};

pub use dop853::StepResult;
pub use events::detect_events;
pub use model::Model;
pub use monitor::{monitor_invariants, DriftReport, InvariantDrift};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Output spacing; `None` records every accepted step.
    pub sample_dt: Option<f64>,
    pub max_steps: usize,
    /// Configured separately in scenario files.
    #[serde(skip)]
    pub events: EventThresholds,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 10.0,
            min_step: 1e-12,
            t_start: 0.0,
            t_end: 1.0,
            sample_dt: Some(0.1),
            max_steps: 10_000_000,
            events: EventThresholds::default(),
        }
    }
}

impl IntegratorSettings {
    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_tol(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_sample_dt(mut self, dt: Option<f64>) -> Self {
        self.sample_dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSettings(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.min_step > 0.0 && self.min_step <= self.max_step) {
            return bad("need 0 < min_step <= max_step");
        }
        if !(self.t_end >= self.t_start) || !self.t_end.is_finite() || !self.t_start.is_finite() {
            return bad("need finite t_end >= t_start");
        }
        if let Some(dt) = self.sample_dt {
            if !(dt > 0.0) {
                return bad("sample_dt must be positive");
            }
        }
        for (name, v) in [
            ("close_approach", self.events.close_approach),
            ("boundary", self.events.boundary),
            ("collapse", self.events.collapse),
            ("singular_approach", self.events.singular_approach),
            ("near_singular", self.events.near_singular),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::InvalidSettings(format!("{name} threshold must be positive")));
                }
            }
        }
        Ok(())
    }
}

struct Recorder<'a> {
    model: &'a Model,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, y: &[f64]) {
        if self.traj.times.last().is_some_and(|&last| t <= last) {
            return;
        }
        let inv = self
            .model
            .invariants(t, y)
            .unwrap_or_else(|_| vec![f64::NAN; self.traj.invariant_names.len()]);
        self.traj.times.push(t);
        self.traj.states.push(y.to_vec());
        self.traj.invariants.push(inv);
    }
}

/// Integrates `model` from `y0` over `[t_start, t_end]`.
///
/// Runs that hit a terminal event or a step-size underflow still return the
/// partial trajectory; [`Trajectory::termination`] says how the run ended and
/// [`Trajectory::status`] converts that to an error. Identical inputs give
/// bit-identical output.
pub fn integrate(model: &Model, y0: &[f64], settings: &IntegratorSettings) -> Result<Trajectory> {
    settings.validate()?;
    if y0.len() != model.dim() {
        return Err(Error::InvalidState(format!(
            "state has {} components, model expects {}",
            y0.len(),
            model.dim()
        )));
    }
    let t0 = settings.t_start;
    let t_end = settings.t_end;
    let mut probe = vec![0.0; y0.len()];
    model
        .eval(t0, y0, &mut probe)
        .map_err(|e| Error::InvalidState(format!("initial state: {e}")))?;

    let mut rec = Recorder {
        model,
        traj: Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            state_names: model.state_names(),
            invariant_names: model.invariant_names(),
            invariants: Vec::new(),
            events: Vec::new(),
            termination: Termination::Completed,
            accepted_steps: 0,
            rejected_steps: 0,
        },
    };
    rec.push(t0, y0);
    if t_end == t0 {
        return Ok(rec.traj);
    }

    let efns = event_functions(model, y0, &settings.events);
    let mut stepper = Dop853::new(y0.len(), settings.rel_tol, settings.abs_tol, settings.max_step);
    let mut y = y0.to_vec();
    let mut y_prev = y0.to_vec();
    let mut t = t0;
    let mut h = stepper.initial_step(model, t, &y)?;
    let mut next_sample = 1usize;
    let sample_time = |k: usize| settings.sample_dt.map(|dt| t0 + k as f64 * dt);
    let mut buf = vec![0.0; y0.len()];

    loop {
        if rec.traj.accepted_steps + rec.traj.rejected_steps >= settings.max_steps {
            rec.traj.termination = Termination::MaxSteps {
                t,
                steps: settings.max_steps,
            };
            break;
        }
        if h < settings.min_step {
            rec.push(t, &y);
            rec.traj.termination = Termination::StepUnderflow { t, h };
            break;
        }
        let last = t + 1.01 * h >= t_end;
        let h_try = if last { t_end - t } else { h };
        y_prev.copy_from_slice(&y);
        let (res, dense) = stepper.step(model, t, &mut y, h_try);
        if !res.accepted {
            rec.traj.rejected_steps += 1;
            h = res.h_new.min(h_try);
            continue;
        }
        rec.traj.accepted_steps += 1;
        let dense = dense.expect("accepted steps carry an interpolant");
        let t_new = if last { t_end } else { t + h_try };

        // events in this step, earliest first
        let mut fired: Vec<Event> = efns
            .iter()
            .filter(|f| f.value(model, &y_prev) > 0.0 && f.value(model, &y) <= 0.0)
            .map(|f| Event {
                t: refine(f, model, &dense),
                kind: f.kind,
                terminal: f.terminal,
                collapse_time: None,
            })
            .collect();
        fired.sort_by(|a, b| a.t.total_cmp(&b.t));
        let stop_at = fired.iter().find(|e| e.terminal).map(|e| e.t);
        if let Some(ts) = stop_at {
            fired.retain(|e| e.t <= ts);
        }
        for ev in fired.iter_mut() {
            if ev.kind == EventKind::Collapse {
                dense.eval_into(ev.t, &mut buf);
                if let Model::Membrane { m, l } = model {
                    let (m, l) = (m.get() as f64, l.get() as f64);
                    if l > m {
                        // a·b decreases at the constant rate l − m
                        ev.collapse_time = Some(ev.t + buf[0] * buf[1] / (l - m));
                    }
                }
            }
        }

        // dense samples strictly inside the (possibly truncated) step
        let horizon = stop_at.unwrap_or(t_new);
        match settings.sample_dt {
            Some(_) => {
                while let Some(ts) = sample_time(next_sample) {
                    if ts > horizon || ts > t_end {
                        break;
                    }
                    if ts == t_new && stop_at.is_none() {
                        rec.push(ts, &y);
                    } else {
                        dense.eval_into(ts, &mut buf);
                        rec.push(ts, &buf);
                    }
                    next_sample += 1;
                }
            }
            None => {
                if stop_at.is_none() {
                    rec.push(t_new, &y);
                }
            }
        }
        rec.traj.events.extend(fired);

        if let Some(ts) = stop_at {
            dense.eval_into(ts, &mut buf);
            rec.push(ts, &buf);
            let ev = rec.traj.events.last().expect("terminal event recorded");
            rec.traj.termination = Termination::EventStop {
                t: ev.collapse_time.unwrap_or(ts),
                kind: ev.kind.label().to_string(),
            };
            break;
        }

        t = t_new;
        if last {
            rec.push(t, &y);
            break;
        }
        h = res.h_new;
    }
    Ok(rec.traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membranes::{membrane_closed_form, SphereProductState};
    use crate::system::VortexSystem;

    #[test]
    fn zero_horizon_keeps_only_initial_sample() {
        let (m, y0) = Model::from_membrane(&SphereProductState::new(1.0, 1.0, 1, 1)).unwrap();
        let tr = integrate(&m, &y0, &IntegratorSettings::default().with_t_end(0.0)).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states, vec![y0]);
    }

    #[test]
    fn membrane_exponential_case() {
        let (m, y0) = Model::from_membrane(&SphereProductState::new(1.0, 1.0, 1, 1)).unwrap();
        let tr = integrate(&m, &y0, &IntegratorSettings::default().with_t_end(1.0)).unwrap();
        assert_eq!(tr.termination, Termination::Completed);
        assert_eq!(*tr.times.last().unwrap(), 1.0);
        let y = tr.last_state();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-8 * (-1f64).exp());
        assert!((y[1] - 1f64.exp()).abs() < 1e-8 * 1f64.exp());
        tr.check_shape().unwrap();
    }

    #[test]
    fn membrane_collapse_event() {
        let (m, y0) = Model::from_membrane(&SphereProductState::new(1.0, 1.0, 1, 2)).unwrap();
        let tr = integrate(&m, &y0, &IntegratorSettings::default().with_t_end(2.0)).unwrap();
        let collapses: Vec<_> = tr.events.iter().filter(|e| e.kind == EventKind::Collapse).collect();
        assert_eq!(collapses.len(), 1);
        let tc = collapses[0].collapse_time.unwrap();
        assert!((tc - 1.0).abs() < 1e-6, "{tc}");
        match &tr.termination {
            Termination::EventStop { t, kind } => {
                assert_eq!(kind, "collapse");
                assert!((t - 1.0).abs() < 1e-6);
            }
            other => panic!("{other:?}"),
        }
        // samples before the event follow the closed form
        for (t, y) in tr.times.iter().zip(&tr.states) {
            if y[0] > 1e-3 {
                let [a, b] = membrane_closed_form(1.0, 1.0, 1, 2, *t).unwrap();
                assert!((y[0] - a).abs() < 1e-8 * a && (y[1] - b).abs() < 1e-8 * b, "t={t}");
            }
        }
    }

    #[test]
    fn deterministic() {
        let s = VortexSystem::plane(vec![1.0, -0.5, 0.8], vec![[0.0, 0.0], [1.0, 0.2], [-0.4, 0.9]]);
        let (m, y0) = Model::from_vortices(&s, Default::default()).unwrap();
        let set = IntegratorSettings::default().with_t_end(5.0);
        let a = integrate(&m, &y0, &set).unwrap();
        let b = integrate(&m, &y0, &set).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_settings() {
        let (m, y0) = Model::from_membrane(&SphereProductState::new(1.0, 1.0, 1, 1)).unwrap();
        let mut s = IntegratorSettings::default();
        s.rel_tol = 0.0;
        assert!(matches!(integrate(&m, &y0, &s), Err(Error::InvalidSettings(_))));
    }
}
