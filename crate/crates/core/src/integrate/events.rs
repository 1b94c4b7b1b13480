//! Threshold events: close approaches, wall approaches, membrane collapse
//! and ring near-coincidence.

use serde::{Deserialize, Serialize};

use crate::integrate::dop853::DenseStep;
use crate::integrate::model::Model;
use crate::rings::NEAR_SINGULAR_GAP;

/// Time tolerance of event refinement.
pub const EVENT_TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// Two point vortices closer than the threshold.
    CloseApproach { i: usize, j: usize },
    /// A vortex closer than the threshold to a wall.
    BoundaryApproach { i: usize },
    /// Membrane radius `a` below the collapse fraction of its initial value.
    Collapse,
    /// Two rings within the near-singular relative gap.
    NearSingular { i: usize, j: usize },
    /// Restricted-three-vortex tracer near one of the co-rotating vortices.
    SingularApproach,
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            EventKind::CloseApproach { .. } => "close_approach",
            EventKind::BoundaryApproach { .. } => "boundary_approach",
            EventKind::Collapse => "collapse",
            EventKind::NearSingular { .. } => "near_singular",
            EventKind::SingularApproach => "singular_approach",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
    pub terminal: bool,
    /// For collapse events: the singular time extrapolated from the exact
    /// `ab` law past the detection threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_time: Option<f64>,
}

/// Event thresholds. `None` disables a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventThresholds {
    pub close_approach: Option<f64>,
    pub boundary: Option<f64>,
    /// Fraction of the initial `a` that counts as collapse.
    pub collapse: Option<f64>,
    /// Distance from `(0, ±1)` that stops a restricted-three-vortex run.
    pub singular_approach: Option<f64>,
    pub near_singular: Option<f64>,
    /// Stop the run at the first close or boundary approach.
    pub stop_on_approach: bool,
}

impl Default for EventThresholds {
    fn default() -> Self {
        Self {
            close_approach: None,
            boundary: None,
            collapse: Some(1e-8),
            singular_approach: Some(1e-3),
            near_singular: Some(NEAR_SINGULAR_GAP),
            stop_on_approach: false,
        }
    }
}

/// One scalar event function `g(y)`; an event fires when `g` drops from
/// positive to non-positive.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EventFn {
    pub kind: EventKind,
    pub terminal: bool,
    threshold: f64,
}

impl EventFn {
    pub fn value(&self, model: &Model, y: &[f64]) -> f64 {
        match self.kind {
            EventKind::CloseApproach { i, j } => {
                (y[2 * i] - y[2 * j]).hypot(y[2 * i + 1] - y[2 * j + 1]) - self.threshold
            }
            EventKind::BoundaryApproach { i } => match model {
                Model::Quadrant { .. } => y[0].min(y[1]) - self.threshold,
                _ => y[2 * i + 1] - self.threshold,
            },
            EventKind::Collapse => y[0] - self.threshold,
            EventKind::NearSingular { i, j } => {
                let gap = (y[2 * i] - y[2 * j]).hypot(y[2 * i + 1] - y[2 * j + 1]);
                gap / y[2 * i + 1].max(y[2 * j + 1]) - self.threshold
            }
            EventKind::SingularApproach => {
                let d1 = y[0].hypot(y[1] - 1.0);
                let d2 = y[0].hypot(y[1] + 1.0);
                d1.min(d2) - self.threshold
            }
        }
    }
}

pub(crate) fn event_functions(model: &Model, y0: &[f64], th: &EventThresholds) -> Vec<EventFn> {
    let mut out = Vec::new();
    let stop = th.stop_on_approach;
    let n_points = match model {
        Model::Plane { strengths, .. } | Model::HalfPlane { strengths, .. } => strengths.len(),
        _ => 0,
    };
    if let Some(d) = th.close_approach {
        for i in 0..n_points {
            for j in (i + 1)..n_points {
                out.push(EventFn {
                    kind: EventKind::CloseApproach { i, j },
                    terminal: stop,
                    threshold: d,
                });
            }
        }
    }
    if let Some(d) = th.boundary {
        match model {
            Model::HalfPlane { .. } => {
                for i in 0..n_points {
                    out.push(EventFn {
                        kind: EventKind::BoundaryApproach { i },
                        terminal: stop,
                        threshold: d,
                    });
                }
            }
            Model::Quadrant { .. } => out.push(EventFn {
                kind: EventKind::BoundaryApproach { i: 0 },
                terminal: stop,
                threshold: d,
            }),
            _ => {}
        }
    }
    match model {
        Model::Membrane { .. } => {
            if let Some(frac) = th.collapse {
                out.push(EventFn {
                    kind: EventKind::Collapse,
                    terminal: true,
                    threshold: frac * y0[0],
                });
            }
        }
        Model::Rings { gammas, .. } => {
            if let Some(gap) = th.near_singular {
                for i in 0..gammas.len() {
                    for j in (i + 1)..gammas.len() {
                        out.push(EventFn {
                            kind: EventKind::NearSingular { i, j },
                            terminal: false,
                            threshold: gap,
                        });
                    }
                }
            }
        }
        Model::Restricted3 { .. } => {
            if let Some(d) = th.singular_approach {
                out.push(EventFn {
                    kind: EventKind::SingularApproach,
                    terminal: true,
                    threshold: d,
                });
            }
        }
        _ => {}
    }
    out
}

/// Event kinds whose threshold is crossed between `previous` and `state`
/// (checks every configured event function at the two endpoints).
pub fn detect_events(
    model: &Model,
    state: &[f64],
    previous: &[f64],
    initial: &[f64],
    thresholds: &EventThresholds,
) -> Vec<EventKind> {
    event_functions(model, initial, thresholds)
        .into_iter()
        .filter(|f| f.value(model, previous) > 0.0 && f.value(model, state) <= 0.0)
        .map(|f| f.kind)
        .collect()
}

/// Bisects the dense interpolant for the crossing time of `f` in a step
/// where it changed sign.
pub(crate) fn refine(f: &EventFn, model: &Model, dense: &DenseStep) -> f64 {
    let (mut lo, mut hi) = (dense.t0, dense.t1());
    let mut buf = vec![0.0; dense.dim()];
    while hi - lo > EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        dense.eval_into(mid, &mut buf);
        if f.value(model, &buf) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
