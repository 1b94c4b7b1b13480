//! Poincaré sections of the restricted three-vortex system, leapfrog
//! classification of pairs, and separation time series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane::{restricted3_h0, Restricted3State};
use crate::integrate::{integrate, IntegratorSettings, Model};
use crate::trajectory::{Termination, Trajectory};

/// Stroboscopic samples of one orbit at `t = kT`, `T = 2π/ω₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub initial: Restricted3State,
    pub period: f64,
    pub points: Vec<[f64; 2]>,
    /// Section time at which the orbit left the escape radius, if it did.
    pub escaped_at: Option<f64>,
}

impl PoincareSection {
    /// `max_k |H₀(x_k, y_k) − H₀(x₀, y₀)|`.
    pub fn max_h0_deviation(&self) -> Result<f64> {
        let h0 = restricted3_h0(self.initial.x, self.initial.y, self.initial.omega0)?;
        let mut worst: f64 = 0.0;
        for p in &self.points {
            worst = worst.max((restricted3_h0(p[0], p[1], self.initial.omega0)? - h0).abs());
        }
        Ok(worst)
    }
}

/// Orbits leaving this radius are reported as escaped.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 10.0;

/// Samples the period-`T` map `n_periods` times (fewer if the orbit escapes
/// `escape_radius`). `settings` supplies tolerances; its horizon and output
/// spacing are overridden.
pub fn poincare_section(
    st0: &Restricted3State,
    n_periods: usize,
    settings: &IntegratorSettings,
    escape_radius: f64,
) -> Result<PoincareSection> {
    if n_periods == 0 {
        return Err(Error::Validation("n_periods must be at least 1".into()));
    }
    let (model, y0) = Model::from_restricted3(st0)?;
    let period = st0.period();
    let mut set = *settings;
    set.t_start = 0.0;
    set.t_end = n_periods as f64 * period;
    set.sample_dt = Some(period);
    if set.events.singular_approach.is_none() {
        set.events.singular_approach = Some(1e-3);
    }
    set.max_step = set.max_step.min(period / 4.0);
    let tr = integrate(&model, &y0, &set)?;
    let mut points = Vec::with_capacity(n_periods);
    let mut escaped_at = None;
    for (k, (t, y)) in tr.times.iter().zip(&tr.states).enumerate().skip(1) {
        if tr.termination != Termination::Completed && k == tr.len() - 1 {
            // final sample of an interrupted run is the stop point, not a section point
            let on_grid = (t / period - (t / period).round()).abs() < 1e-9;
            if !on_grid {
                break;
            }
        }
        if y[0].hypot(y[1]) > escape_radius {
            escaped_at = Some(*t);
            break;
        }
        points.push([y[0], y[1]]);
    }
    match tr.termination {
        Termination::EventStop { t, .. } => return Err(Error::SingularApproach { t }),
        Termination::StepUnderflow { t, h } => return Err(Error::StepUnderflow { t, h }),
        _ => {}
    }
    if points.is_empty() {
        if let Some(t) = escaped_at {
            return Err(Error::OrbitEscaped { t, radius: escape_radius });
        }
    }
    Ok(PoincareSection {
        initial: *st0,
        period,
        points,
        escaped_at,
    })
}

/// Sections for several initial conditions, computed in parallel.
pub fn poincare_sections(
    initials: &[Restricted3State],
    n_periods: usize,
    settings: &IntegratorSettings,
    escape_radius: f64,
) -> Vec<Result<PoincareSection>> {
    initials
        .par_iter()
        .map(|st| poincare_section(st, n_periods, settings, escape_radius))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeapfrogClass {
    Leapfrog,
    Passing,
    CoTranslating,
    Undetermined,
}

/// Minimum number of overtakes for leapfrogging.
pub const LEAPFROG_MIN_CROSSINGS: usize = 3;
/// Largest max/min separation ratio still counted as bounded.
pub const LEAPFROG_MAX_RATIO: f64 = 1e3;
/// Relative separation band for co-translation.
pub const COTRANSLATION_BAND: f64 = 0.01;

/// Relative axial coordinate and separation of a like-signed pair, sample
/// by sample.
fn pair_series(model: &Model, traj: &Trajectory) -> Result<(Vec<f64>, Vec<f64>)> {
    let strengths = match model {
        Model::HalfPlane { strengths, .. } | Model::Plane { strengths, .. } => strengths.clone(),
        Model::Rings { gammas, .. } => gammas.clone(),
        _ => {
            return Err(Error::Validation(format!(
                "leapfrog classification needs a vortex pair or ring pair, got {}",
                model.name()
            )))
        }
    };
    if strengths.len() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            found: strengths.len(),
        });
    }
    if strengths[0] * strengths[1] <= 0.0 {
        return Err(Error::MixedSigns);
    }
    let axial = traj.states.iter().map(|s| s[0] - s[2]).collect();
    let sep = traj.states.iter().map(|s| (s[0] - s[2]).hypot(s[1] - s[3])).collect();
    Ok((axial, sep))
}

fn sign_changes(xs: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last = 0.0f64;
    for (k, &x) in xs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            out.push(k);
        }
        last = x;
    }
    out
}

/// Classifies the relative motion of two like-signed half-plane vortices
/// or coaxial rings from a trajectory.
pub fn leapfrog_classify(model: &Model, traj: &Trajectory) -> Result<LeapfrogClass> {
    let (axial, sep) = pair_series(model, traj)?;
    if sep.is_empty() {
        return Ok(LeapfrogClass::Undetermined);
    }
    let max = sep.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = sep.iter().cloned().fold(f64::INFINITY, f64::min);
    let crossings = sign_changes(&axial);
    if crossings.len() >= LEAPFROG_MIN_CROSSINGS && max / min < LEAPFROG_MAX_RATIO {
        return Ok(LeapfrogClass::Leapfrog);
    }
    if (max - min) / min < COTRANSLATION_BAND {
        return Ok(LeapfrogClass::CoTranslating);
    }
    if crossings.len() == 1 {
        let after = &sep[crossings[0]..];
        if after.windows(2).all(|w| w[1] >= w[0]) && after.last() > after.first() {
            return Ok(LeapfrogClass::Passing);
        }
    }
    Ok(LeapfrogClass::Undetermined)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationSample {
    pub t: f64,
    /// `dᵢⱼ` for `i < j` in lexicographic order.
    pub pairwise: Vec<f64>,
    /// Distance of each vortex to the nearest wall (to the axis for rings).
    pub boundary: Vec<f64>,
}

pub fn separation_series(model: &Model, traj: &Trajectory) -> Result<Vec<SeparationSample>> {
    if !matches!(
        model,
        Model::Plane { .. } | Model::HalfPlane { .. } | Model::Quadrant { .. } | Model::Rings { .. }
    ) {
        return Err(Error::Validation(format!(
            "separation series needs a vortex or ring model, got {}",
            model.name()
        )));
    }
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, s)| {
            let pts: Vec<[f64; 2]> = s.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            let mut pairwise = Vec::new();
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    pairwise.push((pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
                }
            }
            let boundary = match model {
                Model::Plane { .. } => Vec::new(),
                Model::Quadrant { .. } => pts.iter().map(|p| p[0].min(p[1])).collect(),
                _ => pts.iter().map(|p| p[1]).collect(),
            };
            SeparationSample { t, pairwise, boundary }
        })
        .collect())
}
