//! Sampled solution of one integration run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::events::Event;

/// Why a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// A terminal event (collapse, singular approach) stopped the run.
    EventStop { t: f64, kind: String },
    /// The step size fell below `min_step`, typically near a collision.
    StepUnderflow { t: f64, h: f64 },
    MaxSteps { t: f64, steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub state_names: Vec<String>,
    pub invariant_names: Vec<String>,
    /// `invariants[k][j]` is invariant `j` at sample `k`.
    pub invariants: Vec<Vec<f64>>,
    pub events: Vec<Event>,
    pub termination: Termination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Values of invariant `name` across all samples.
    pub fn invariant_series(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.invariant_names.iter().position(|n| n == name)?;
        Some(self.invariants.iter().map(|row| row[j]).collect())
    }

    /// Values of state component `index` across all samples.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index]).collect()
    }

    /// `Ok` for a completed run, otherwise the matching error.
    pub fn status(&self) -> Result<()> {
        match &self.termination {
            Termination::Completed => Ok(()),
            Termination::EventStop { t, kind } => Err(Error::EventStop {
                t: *t,
                kind: kind.clone(),
            }),
            Termination::StepUnderflow { t, h } => Err(Error::StepUnderflow { t: *t, h: *h }),
            Termination::MaxSteps { t, steps } => Err(Error::InvalidState(format!(
                "step budget of {steps} exhausted at t = {t}"
            ))),
        }
    }

    /// Checks the structural invariants: strictly increasing times and one
    /// state / invariant record per sample.
    pub fn check_shape(&self) -> Result<()> {
        if self.states.len() != self.times.len() || self.invariants.len() != self.times.len() {
            return Err(Error::InvalidState("sample count mismatch".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidState("times are not strictly increasing".into()));
        }
        let width = self.invariant_names.len();
        if self.invariants.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidState("ragged invariant record".into()));
        }
        Ok(())
    }
}
