//! Point-vortex configurations and the plane-family moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Separations below this are treated as a collision.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// Relative tolerance of [`collapse_condition`].
pub const COLLAPSE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Plane,
    HalfPlane,
    Quadrant,
}

impl Domain {
    fn contains(self, [x, y]: [f64; 2]) -> bool {
        if !(x.is_finite() && y.is_finite()) {
            return false;
        }
        match self {
            Domain::Plane => true,
            Domain::HalfPlane => y > 0.0,
            Domain::Quadrant => x > 0.0 && y > 0.0,
        }
    }
}

/// N point vortices in one of the plane-family domains.
///
/// A vortex with `strength == 0` is only accepted when its `tracers` flag is
/// set; it is then advected by the others without influencing them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexSystem {
    pub domain: Domain,
    pub strengths: Vec<f64>,
    pub positions: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tracers: Vec<bool>,
}

impl VortexSystem {
    pub fn new(domain: Domain, strengths: Vec<f64>, positions: Vec<[f64; 2]>) -> Self {
        Self {
            domain,
            strengths,
            positions,
            tracers: Vec::new(),
        }
    }

    pub fn plane(strengths: Vec<f64>, positions: Vec<[f64; 2]>) -> Self {
        Self::new(Domain::Plane, strengths, positions)
    }

    pub fn half_plane(strengths: Vec<f64>, positions: Vec<[f64; 2]>) -> Self {
        Self::new(Domain::HalfPlane, strengths, positions)
    }

    /// Marks vortex `index` as a passive tracer.
    pub fn with_tracer(mut self, index: usize) -> Self {
        if self.tracers.len() < self.strengths.len() {
            self.tracers.resize(self.strengths.len(), false);
        }
        self.tracers[index] = true;
        self
    }

    pub fn len(&self) -> usize {
        self.strengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strengths.is_empty()
    }

    pub fn is_tracer(&self, index: usize) -> bool {
        self.tracers.get(index).copied().unwrap_or(false)
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let [xi, yi] = self.positions[i];
        let [xj, yj] = self.positions[j];
        (xi - xj).hypot(yi - yj)
    }

    /// Positions flattened as `[x0, y0, x1, y1, ...]`.
    pub fn flat_positions(&self) -> Vec<f64> {
        self.positions.iter().flat_map(|p| p.iter().copied()).collect()
    }

    /// Same strengths and domain, positions taken from a flat state vector.
    pub fn with_flat_positions(&self, state: &[f64]) -> Self {
        let positions = state.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        Self {
            domain: self.domain,
            strengths: self.strengths.clone(),
            positions,
            tracers: self.tracers.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_system(self)
    }
}

pub fn validate_system(s: &VortexSystem) -> Result<()> {
    if s.strengths.is_empty() && s.positions.is_empty() {
        return Err(Error::EmptySystem);
    }
    if s.strengths.len() != s.positions.len() {
        return Err(Error::LengthMismatch {
            strengths: s.strengths.len(),
            positions: s.positions.len(),
        });
    }
    if s.domain == Domain::Quadrant && s.len() != 1 {
        return Err(Error::WrongArity {
            expected: 1,
            found: s.len(),
        });
    }
    for (index, (&gamma, &p)) in s.strengths.iter().zip(&s.positions).enumerate() {
        if !gamma.is_finite() || (gamma == 0.0 && !s.is_tracer(index)) {
            return Err(Error::ZeroStrength { index });
        }
        if !s.domain.contains(p) {
            return Err(Error::DomainViolation {
                index,
                x: p[0],
                y: p[1],
                domain: s.domain,
            });
        }
    }
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            let distance = s.distance(i, j);
            if distance < COINCIDENCE_TOL {
                return Err(Error::CoincidentVortices { i, j, distance });
            }
        }
    }
    Ok(())
}

/// Linear and angular moments `Q = ΣΓx`, `P = ΣΓy`, `I = ΣΓ(x²+y²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneMoments {
    pub q: f64,
    pub p: f64,
    pub i: f64,
}

pub fn plane_invariants(s: &VortexSystem) -> PlaneMoments {
    let mut m = PlaneMoments {
        q: 0.0,
        p: 0.0,
        i: 0.0,
    };
    for (&g, &[x, y]) in s.strengths.iter().zip(&s.positions) {
        m.q += g * x;
        m.p += g * y;
        m.i += g * (x * x + y * y);
    }
    m
}

/// Necessary condition for self-similar collapse: `Σ_{i<j} ΓᵢΓⱼ = 0`,
/// checked relative to `Σ_{i<j} |ΓᵢΓⱼ|`.
pub fn collapse_condition(strengths: &[f64]) -> bool {
    collapse_condition_with_tol(strengths, COLLAPSE_TOL)
}

pub fn collapse_condition_with_tol(strengths: &[f64], tol: f64) -> bool {
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for (i, gi) in strengths.iter().enumerate() {
        for gj in &strengths[i + 1..] {
            sum += gi * gj;
            abs_sum += (gi * gj).abs();
        }
    }
    if strengths.len() < 2 {
        return false;
    }
    sum.abs() <= tol * abs_sum
}
