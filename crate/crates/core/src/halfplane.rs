//! Vortices above a straight wall (`y > 0`), the reduced two-vortex orbit
//! equations, and the perturbed restricted three-vortex system.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Domain, VortexSystem, COINCIDENCE_TOL};

/// Overall prefactor of the half-plane Hamiltonian.
///
/// `Verbatim` uses `(1/4π)ΣΓᵢΓⱼ log(image²/direct²) + (1/2π)ΣΓᵢ² log 2yᵢ`.
/// `GreenFunction` is the same expression halved, which is what the
/// `½ΣΓᵢΓⱼG + ½ΣΓᵢ²γ̂` construction with the mirror-image Green function
/// produces. The two differ only by a rescaling of time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    Verbatim,
    GreenFunction,
}

impl Normalization {
    pub fn factor(self) -> f64 {
        match self {
            Normalization::Verbatim => 1.0,
            Normalization::GreenFunction => 0.5,
        }
    }
}

fn require_half_plane(s: &VortexSystem) -> Result<()> {
    if s.domain != Domain::HalfPlane {
        return Err(Error::Validation(format!(
            "expected a half-plane system, got {:?}",
            s.domain
        )));
    }
    for (index, &[x, y]) in s.positions.iter().enumerate() {
        if !(y > 0.0) {
            return Err(Error::DomainViolation {
                index,
                x,
                y,
                domain: Domain::HalfPlane,
            });
        }
    }
    Ok(())
}

/// Squared direct and image separations `(dx² + (yᵢ−yⱼ)², dx² + (yᵢ+yⱼ)²)`.
fn pair_terms(s: &VortexSystem, i: usize, j: usize) -> Result<(f64, f64)> {
    let [xi, yi] = s.positions[i];
    let [xj, yj] = s.positions[j];
    let dx2 = (xi - xj).powi(2);
    let direct = dx2 + (yi - yj).powi(2);
    if direct < COINCIDENCE_TOL * COINCIDENCE_TOL {
        return Err(Error::CoincidentVortices {
            i: i.min(j),
            j: i.max(j),
            distance: direct.sqrt(),
        });
    }
    Ok((direct, dx2 + (yi + yj).powi(2)))
}

pub fn hamiltonian_halfplane(s: &VortexSystem) -> Result<f64> {
    hamiltonian_halfplane_with(s, Normalization::Verbatim)
}

pub fn hamiltonian_halfplane_with(s: &VortexSystem, norm: Normalization) -> Result<f64> {
    require_half_plane(s)?;
    let n = s.len();
    let mut h = 0.0;
    for i in 0..n {
        let gi = s.strengths[i];
        for j in (i + 1)..n {
            let (direct, image) = pair_terms(s, i, j)?;
            // both orderings (i,j) and (j,i)
            h += gi * s.strengths[j] * (image / direct).ln() / (2.0 * PI);
        }
        h += gi * gi * (2.0 * s.positions[i][1]).ln() / (2.0 * PI);
    }
    Ok(norm.factor() * h)
}

pub fn hamiltonian_halfplane_gradient(s: &VortexSystem) -> Result<Vec<[f64; 2]>> {
    hamiltonian_halfplane_gradient_with(s, Normalization::Verbatim)
}

pub fn hamiltonian_halfplane_gradient_with(
    s: &VortexSystem,
    norm: Normalization,
) -> Result<Vec<[f64; 2]>> {
    require_half_plane(s)?;
    let n = s.len();
    let k = norm.factor();
    let mut grad = vec![[0.0; 2]; n];
    for i in 0..n {
        let [xi, yi] = s.positions[i];
        let gi = s.strengths[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let [xj, yj] = s.positions[j];
            let (direct, image) = pair_terms(s, i, j)?;
            let c = k * gi * s.strengths[j] / PI;
            let dx = xi - xj;
            grad[i][0] += c * dx * (1.0 / image - 1.0 / direct);
            grad[i][1] += c * ((yi + yj) / image - (yi - yj) / direct);
        }
        grad[i][1] += k * gi * gi / (2.0 * PI * yi);
    }
    Ok(grad)
}

/// Vortex velocities from `Γᵢẋᵢ = ∂H/∂yᵢ`, `Γᵢẏᵢ = −∂H/∂xᵢ`, written with the
/// `1/Γᵢ` already cancelled so flagged tracers (`Γᵢ = 0`) are advected by the
/// field of the others with no self term.
pub fn velocity_halfplane(s: &VortexSystem) -> Result<Vec<[f64; 2]>> {
    velocity_halfplane_with(s, Normalization::Verbatim)
}

pub fn velocity_halfplane_with(s: &VortexSystem, norm: Normalization) -> Result<Vec<[f64; 2]>> {
    require_half_plane(s)?;
    let n = s.len();
    let k = norm.factor();
    let mut v = vec![[0.0; 2]; n];
    for i in 0..n {
        let [xi, yi] = s.positions[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let [xj, yj] = s.positions[j];
            let (direct, image) = pair_terms(s, i, j)?;
            let c = k * s.strengths[j] / PI;
            let dx = xi - xj;
            v[i][0] += c * ((yi + yj) / image - (yi - yj) / direct);
            v[i][1] -= c * dx * (1.0 / image - 1.0 / direct);
        }
        v[i][0] += k * s.strengths[i] / (2.0 * PI * yi);
    }
    Ok(v)
}

/// Closed-form motion of a lone vortex: `x = x0 + Γt/(2πy0)`, `y = y0`.
pub fn single_vortex_halfplane_solution(gamma: f64, x0: f64, y0: f64, t: f64) -> Result<[f64; 2]> {
    if !(y0 > 0.0) {
        return Err(Error::DomainViolation {
            index: 0,
            x: x0,
            y: y0,
            domain: Domain::HalfPlane,
        });
    }
    Ok([x0 + gamma * t / (2.0 * PI * y0), y0])
}

fn require_pair(s: &VortexSystem) -> Result<()> {
    if s.len() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            found: s.len(),
        });
    }
    Ok(())
}

/// The coordinate conserved by a half-plane pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConservedHeight {
    /// `y₀ = (Γ₁y₁+Γ₂y₂)/(Γ₁+Γ₂)` when `Γ₁+Γ₂ ≠ 0`.
    Center(f64),
    /// `y_r = y₁−y₂` for a dipole.
    Separation(f64),
}

impl ConservedHeight {
    pub fn value(self) -> f64 {
        match self {
            ConservedHeight::Center(v) | ConservedHeight::Separation(v) => v,
        }
    }
}

pub fn conserved_height(s: &VortexSystem) -> Result<ConservedHeight> {
    require_pair(s)?;
    let (g1, g2) = (s.strengths[0], s.strengths[1]);
    let (y1, y2) = (s.positions[0][1], s.positions[1][1]);
    if g1 + g2 == 0.0 {
        Ok(ConservedHeight::Separation(y1 - y2))
    } else {
        Ok(ConservedHeight::Center((g1 * y1 + g2 * y2) / (g1 + g2)))
    }
}

/// Level-set parameters `(μ, E)` of a non-dipole pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedGenericOrbitParams {
    pub mu: f64,
    pub energy: f64,
    pub strengths: [f64; 2],
}

impl ReducedGenericOrbitParams {
    pub fn from_system(s: &VortexSystem) -> Result<Self> {
        require_pair(s)?;
        let strengths = [s.strengths[0], s.strengths[1]];
        let mu = match conserved_height(s)? {
            ConservedHeight::Center(mu) => mu,
            ConservedHeight::Separation(_) => {
                return Err(Error::Validation(
                    "generic orbit parameters need Γ₁+Γ₂ ≠ 0".into(),
                ))
            }
        };
        Ok(Self {
            mu,
            energy: hamiltonian_halfplane(s)?,
            strengths,
        })
    }
}

/// `log` of the reduced-orbit left-hand side, including the `2^(Γ₁²+Γ₂²)`
/// carried by the `(2y)^{Γ²}` factors of the pair Hamiltonian.
fn generic_orbit_log_lhs(x_r: f64, y_r: f64, p: &ReducedGenericOrbitParams) -> Result<f64> {
    let [g1, g2] = p.strengths;
    let total = g1 + g2;
    let h1 = p.mu + g2 / total * y_r;
    let h2 = p.mu - g1 / total * y_r;
    for height in [h1, h2] {
        if !(height > 0.0) {
            return Err(Error::NonPositiveBase { height });
        }
    }
    let sum = 2.0 * p.mu + (g2 - g1) / total * y_r;
    let direct = x_r * x_r + y_r * y_r;
    if direct == 0.0 {
        return Err(Error::CoincidentVortices {
            i: 0,
            j: 1,
            distance: 0.0,
        });
    }
    let ratio = (x_r * x_r + sum * sum) / direct;
    Ok(g1 * g1 * (2.0 * h1).ln() + g2 * g2 * (2.0 * h2).ln() + g1 * g2 * ratio.ln())
}

/// Left-hand side of the `(x_r, y_r)` orbit equation minus `e^{2πE}`.
pub fn orbit_residual_generic(x_r: f64, y_r: f64, p: &ReducedGenericOrbitParams) -> Result<f64> {
    let log_lhs = generic_orbit_log_lhs(x_r, y_r, p)?;
    let rhs_log = 2.0 * PI * p.energy;
    Ok(rhs_log.exp() * (log_lhs - rhs_log).exp_m1())
}

/// Residual divided by `e^{2πE}`.
pub fn orbit_relative_residual_generic(
    x_r: f64,
    y_r: f64,
    p: &ReducedGenericOrbitParams,
) -> Result<f64> {
    let log_lhs = generic_orbit_log_lhs(x_r, y_r, p)?;
    Ok((log_lhs - 2.0 * PI * p.energy).exp_m1())
}

/// Level-set parameters `(ν, E)` of a `(1, −1)` dipole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDipoleOrbitParams {
    pub nu: f64,
    pub energy: f64,
}

impl ReducedDipoleOrbitParams {
    pub fn from_system(s: &VortexSystem) -> Result<Self> {
        require_pair(s)?;
        if s.strengths != [1.0, -1.0] {
            return Err(Error::Validation(
                "dipole orbit parameters need strengths exactly (1, -1)".into(),
            ));
        }
        Ok(Self {
            nu: s.positions[0][1] - s.positions[1][1],
            energy: hamiltonian_halfplane(s)?,
        })
    }

    /// Parameters with `e^{−2πE} = c`.
    pub fn from_c(nu: f64, c: f64) -> Self {
        Self {
            nu,
            energy: -c.ln() / (2.0 * PI),
        }
    }

    /// `C = e^{−2πE}`.
    pub fn c(&self) -> f64 {
        (-2.0 * PI * self.energy).exp()
    }
}

/// `1/(ν²+x_r²) + 1/(4y₀²−ν²) − e^{−2πE}`.
pub fn orbit_residual_dipole(x_r: f64, y0: f64, p: &ReducedDipoleOrbitParams) -> Result<f64> {
    let nu2 = p.nu * p.nu;
    let den = 4.0 * y0 * y0 - nu2;
    if den.abs() <= f64::EPSILON * nu2.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularDenominator);
    }
    Ok(1.0 / (nu2 + x_r * x_r) + 1.0 / den - p.c())
}

/// Whether the dipole orbit reaches `x_r = 0`, and the `4y₀²` it does so at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reachability {
    pub reachable: bool,
    pub four_y0_sq: Option<f64>,
}

pub fn reachability_x_r_zero(p: &ReducedDipoleOrbitParams) -> Result<Reachability> {
    if p.nu == 0.0 {
        return Err(Error::ZeroNu);
    }
    let c = p.c();
    let nu2 = p.nu * p.nu;
    let threshold = 1.0 / nu2;
    if c > threshold {
        Ok(Reachability {
            reachable: true,
            four_y0_sq: Some(c * nu2 / (c - threshold)),
        })
    } else {
        Ok(Reachability {
            reachable: false,
            four_y0_sq: None,
        })
    }
}

/// Default co-rotation rate of the leading-order pair in rescaled units.
pub const DEFAULT_OMEGA0: f64 = 1.0 / (4.0 * PI);

/// Passive vortex in the frame co-rotating with a close like-signed pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Restricted3State {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
}

fn default_omega0() -> f64 {
    DEFAULT_OMEGA0
}

impl Restricted3State {
    pub fn new(x: f64, y: f64, epsilon: f64) -> Self {
        Self {
            x,
            y,
            epsilon,
            omega0: DEFAULT_OMEGA0,
        }
    }

    pub fn at(&self, x: f64, y: f64) -> Self {
        Self { x, y, ..*self }
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::Validation("omega0 must be positive".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::Validation("epsilon must be non-negative".into()));
        }
        singular_check(self.x, self.y)
    }
}

fn singular_check(x: f64, y: f64) -> Result<()> {
    let d1 = x * x + (y - 1.0).powi(2);
    let d2 = x * x + (y + 1.0).powi(2);
    if d1.min(d2) < COINCIDENCE_TOL * COINCIDENCE_TOL || !(x.is_finite() && y.is_finite()) {
        return Err(Error::SingularPoint { x, y });
    }
    Ok(())
}

/// Unperturbed part `H₀ = (1/2π) log([x²+(y−1)²][x²+(y+1)²]) + ½ω₀(x²+y²)`.
pub fn restricted3_h0(x: f64, y: f64, omega0: f64) -> Result<f64> {
    singular_check(x, y)?;
    let d1 = x * x + (y - 1.0).powi(2);
    let d2 = x * x + (y + 1.0).powi(2);
    Ok((d1.ln() + d2.ln()) / (2.0 * PI) + 0.5 * omega0 * (x * x + y * y))
}

/// `H₀ + εH₁` with `H₁ = −(5/4π)(x sin ω₀t + y cos ω₀t)`.
pub fn restricted3_hamiltonian(st: &Restricted3State, t: f64) -> Result<f64> {
    let h0 = restricted3_h0(st.x, st.y, st.omega0)?;
    let (s, c) = (st.omega0 * t).sin_cos();
    Ok(h0 - st.epsilon * 5.0 / (4.0 * PI) * (st.x * s + st.y * c))
}

/// `(∂H/∂x, ∂H/∂y)` of [`restricted3_hamiltonian`].
pub fn restricted3_gradient(st: &Restricted3State, t: f64) -> Result<[f64; 2]> {
    let (x, y) = (st.x, st.y);
    singular_check(x, y)?;
    let d1 = x * x + (y - 1.0).powi(2);
    let d2 = x * x + (y + 1.0).powi(2);
    let (s, c) = (st.omega0 * t).sin_cos();
    let k = st.epsilon * 5.0 / (4.0 * PI);
    Ok([
        x / PI * (1.0 / d1 + 1.0 / d2) + st.omega0 * x - k * s,
        ((y - 1.0) / d1 + (y + 1.0) / d2) / PI + st.omega0 * y - k * c,
    ])
}

/// Tracer flow `ẋ = ∂H/∂y`, `ẏ = −∂H/∂x`.
pub fn restricted3_velocity(st: &Restricted3State, t: f64) -> Result<[f64; 2]> {
    let [hx, hy] = restricted3_gradient(st, t)?;
    Ok([hy, -hx])
}
