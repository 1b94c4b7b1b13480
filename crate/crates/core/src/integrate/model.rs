//! The dynamical models as flat-state ODE right-hand sides.

use std::f64::consts::PI;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane::{self, Normalization, Restricted3State};
use crate::integrate::dop853::OdeRhs;
use crate::membranes::{self, SphereProductState};
use crate::planar;
use crate::quadrant;
use crate::rings::{self, Ring, RingSystem};
use crate::system::{plane_invariants, Domain, VortexSystem};

/// A model together with the parameters that stay fixed during a run. The
/// state it evolves is a flat vector described by [`Model::state_names`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// State `[x₀, y₀, x₁, y₁, ...]`.
    Plane { strengths: Vec<f64>, tracers: Vec<bool> },
    /// State `[x₀, y₀, x₁, y₁, ...]`, `yᵢ > 0`.
    HalfPlane {
        strengths: Vec<f64>,
        tracers: Vec<bool>,
        normalization: Normalization,
    },
    /// State `[x, y]`.
    Quadrant { gamma: f64 },
    /// State `[Z₀, R₀, Z₁, R₁, ...]`; core radius `aᵢ = √(κᵢ/Rᵢ)`.
    Rings { gammas: Vec<f64>, kappas: Vec<f64> },
    /// State `[a, b]`.
    Membrane { m: NonZeroU32, l: NonZeroU32 },
    /// State `[x, y]` of the passive vortex; explicitly time dependent.
    Restricted3 { epsilon: f64, omega0: f64 },
}

impl Model {
    pub fn from_vortices(s: &VortexSystem, normalization: Normalization) -> Result<(Self, Vec<f64>)> {
        s.validate()?;
        let model = match s.domain {
            Domain::Plane => Model::Plane {
                strengths: s.strengths.clone(),
                tracers: s.tracers.clone(),
            },
            Domain::HalfPlane => Model::HalfPlane {
                strengths: s.strengths.clone(),
                tracers: s.tracers.clone(),
                normalization,
            },
            Domain::Quadrant => Model::Quadrant { gamma: s.strengths[0] },
        };
        Ok((model, s.flat_positions()))
    }

    pub fn from_rings(s: &RingSystem) -> Result<(Self, Vec<f64>)> {
        s.validate()?;
        let model = Model::Rings {
            gammas: s.rings.iter().map(|r| r.gamma).collect(),
            kappas: s.rings.iter().map(|r| r.a * r.a * r.r).collect(),
        };
        Ok((model, s.flat_state()))
    }

    pub fn from_membrane(st: &SphereProductState) -> Result<(Self, Vec<f64>)> {
        st.validate()?;
        Ok((Model::Membrane { m: st.m, l: st.l }, vec![st.a, st.b]))
    }

    pub fn from_restricted3(st: &Restricted3State) -> Result<(Self, Vec<f64>)> {
        st.validate()?;
        Ok((
            Model::Restricted3 {
                epsilon: st.epsilon,
                omega0: st.omega0,
            },
            vec![st.x, st.y],
        ))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Plane { .. } => "plane",
            Model::HalfPlane { .. } => "half_plane",
            Model::Quadrant { .. } => "quadrant",
            Model::Rings { .. } => "rings",
            Model::Membrane { .. } => "membrane",
            Model::Restricted3 { .. } => "restricted3",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Plane { strengths, .. } | Model::HalfPlane { strengths, .. } => 2 * strengths.len(),
            Model::Rings { gammas, .. } => 2 * gammas.len(),
            Model::Quadrant { .. } | Model::Membrane { .. } | Model::Restricted3 { .. } => 2,
        }
    }

    pub fn state_names(&self) -> Vec<String> {
        let pairs = |a: &str, b: &str, n: usize| -> Vec<String> {
            (0..n).flat_map(|i| [format!("{a}{i}"), format!("{b}{i}")]).collect()
        };
        match self {
            Model::Plane { strengths, .. } | Model::HalfPlane { strengths, .. } => {
                pairs("x", "y", strengths.len())
            }
            Model::Rings { gammas, .. } => pairs("Z", "R", gammas.len()),
            Model::Quadrant { .. } | Model::Restricted3 { .. } => vec!["x".into(), "y".into()],
            Model::Membrane { .. } => vec!["a".into(), "b".into()],
        }
    }

    /// Whether the model's conserved quantities depend only on the state.
    pub fn is_autonomous(&self) -> bool {
        !matches!(self, Model::Restricted3 { epsilon, .. } if *epsilon != 0.0)
    }

    pub fn invariant_names(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Model::Plane { .. } => &["H", "Q", "P", "I"],
            Model::HalfPlane { .. } => &["H", "P"],
            Model::Quadrant { .. } => &["H", "C"],
            Model::Rings { .. } => &["H", "M"],
            Model::Membrane { .. } => &["volume"],
            Model::Restricted3 { .. } => &["H0"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    /// Which invariants are actually conserved by this parameter choice.
    pub fn invariant_conserved(&self) -> Vec<bool> {
        let n = self.invariant_names().len();
        vec![self.is_autonomous(); n]
    }

    pub fn vortex_system(&self, y: &[f64]) -> Option<VortexSystem> {
        let (domain, strengths, tracers) = match self {
            Model::Plane { strengths, tracers } => (Domain::Plane, strengths.clone(), tracers.clone()),
            Model::HalfPlane { strengths, tracers, .. } => (Domain::HalfPlane, strengths.clone(), tracers.clone()),
            Model::Quadrant { gamma } => (Domain::Quadrant, vec![*gamma], Vec::new()),
            _ => return None,
        };
        Some(VortexSystem {
            domain,
            strengths,
            positions: y.chunks_exact(2).map(|c| [c[0], c[1]]).collect(),
            tracers,
        })
    }

    pub fn ring_system(&self, y: &[f64]) -> Option<RingSystem> {
        match self {
            Model::Rings { gammas, kappas } => Some(RingSystem::new(
                gammas
                    .iter()
                    .zip(kappas)
                    .zip(y.chunks_exact(2))
                    .map(|((&gamma, &kappa), zr)| Ring {
                        z: zr[0],
                        r: zr[1],
                        gamma,
                        a: rings::volume_conserving_core(kappa, zr[1]),
                    })
                    .collect(),
            )),
            _ => None,
        }
    }

    pub fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        match self {
            Model::Plane { .. } => {
                let s = self.vortex_system(y).expect("vortex model");
                let v = planar::velocity_plane(&s)?;
                write_pairs(&v, dy);
            }
            Model::HalfPlane { normalization, .. } => {
                let s = self.vortex_system(y).expect("vortex model");
                let v = halfplane::velocity_halfplane_with(&s, *normalization)?;
                write_pairs(&v, dy);
            }
            Model::Quadrant { gamma } => {
                let v = quadrant::velocity_quadrant(*gamma, y[0], y[1])?;
                dy.copy_from_slice(&v);
            }
            Model::Rings { .. } => {
                let s = self.ring_system(y).expect("ring model");
                if s.rings.iter().any(|r| !(r.r > 0.0)) {
                    return Err(Error::InvalidState("ring radius left R > 0".into()));
                }
                let v = rings::velocity_rings(&s)?;
                write_pairs(&v, dy);
            }
            Model::Membrane { m, l } => {
                if !(y[0] > 0.0 && y[1] > 0.0) {
                    return Err(Error::InvalidMembrane("radius reached zero".into()));
                }
                let st = SphereProductState { a: y[0], b: y[1], m: *m, l: *l };
                dy.copy_from_slice(&membranes::membrane_rhs(&st));
            }
            Model::Restricted3 { epsilon, omega0 } => {
                let st = Restricted3State {
                    x: y[0],
                    y: y[1],
                    epsilon: *epsilon,
                    omega0: *omega0,
                };
                dy.copy_from_slice(&halfplane::restricted3_velocity(&st, t)?);
            }
        }
        Ok(())
    }

    pub fn invariants(&self, t: f64, y: &[f64]) -> Result<Vec<f64>> {
        Ok(match self {
            Model::Plane { .. } => {
                let s = self.vortex_system(y).expect("vortex model");
                let m = plane_invariants(&s);
                vec![planar::hamiltonian_plane(&s)?, m.q, m.p, m.i]
            }
            Model::HalfPlane { normalization, .. } => {
                let s = self.vortex_system(y).expect("vortex model");
                let p = plane_invariants(&s).p;
                vec![halfplane::hamiltonian_halfplane_with(&s, *normalization)?, p]
            }
            Model::Quadrant { gamma } => vec![
                quadrant::hamiltonian_quadrant(*gamma, y[0], y[1])?,
                quadrant::trajectory_constant(y[0], y[1])?,
            ],
            Model::Rings { .. } => {
                let s = self.ring_system(y).expect("ring model");
                vec![rings::hamiltonian_rings(&s)?, rings::ring_moment(&s)]
            }
            Model::Membrane { m, l } => {
                let st = SphereProductState { a: y[0], b: y[1], m: *m, l: *l };
                vec![membranes::membrane_volume_invariant(&st)]
            }
            Model::Restricted3 { omega0, .. } => {
                let _ = t;
                vec![halfplane::restricted3_h0(y[0], y[1], *omega0)?]
            }
        })
    }

    /// Magnitudes used to turn absolute drift into relative drift when an
    /// invariant's initial value is close to zero.
    pub fn invariant_scales(&self, y: &[f64]) -> Vec<f64> {
        match self {
            Model::Plane { strengths, .. } | Model::HalfPlane { strengths, .. } => {
                let n = strengths.len();
                let pos: Vec<[f64; 2]> = y.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
                let mut h = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let l = (pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]);
                        h += (strengths[i] * strengths[j]).abs() * (l.ln().abs() + 1.0);
                    }
                    if matches!(self, Model::HalfPlane { .. }) {
                        h += strengths[i].powi(2) * ((2.0 * pos[i][1]).ln().abs() + 1.0);
                    }
                }
                h /= 2.0 * PI;
                let r: f64 = strengths.iter().zip(&pos).map(|(g, p)| g.abs() * p[0].hypot(p[1])).sum();
                let r2: f64 = strengths
                    .iter()
                    .zip(&pos)
                    .map(|(g, p)| g.abs() * (p[0] * p[0] + p[1] * p[1]))
                    .sum();
                let hy: f64 = strengths.iter().zip(&pos).map(|(g, p)| g.abs() * p[1].abs()).sum();
                match self {
                    Model::Plane { .. } => vec![h, r, r, r2],
                    _ => vec![h, hy],
                }
            }
            Model::Quadrant { gamma } => vec![gamma * gamma / (2.0 * PI), 0.0],
            Model::Rings { gammas, .. } => {
                let m: f64 = gammas
                    .iter()
                    .zip(y.chunks_exact(2))
                    .map(|(g, zr)| g.abs() * zr[1] * zr[1])
                    .sum();
                let h: f64 = gammas.iter().zip(y.chunks_exact(2)).map(|(g, zr)| g * g * zr[1]).sum::<f64>()
                    / (4.0 * PI);
                vec![h, m]
            }
            Model::Membrane { .. } => vec![1.0],
            Model::Restricted3 { omega0, .. } => vec![1.0 / (2.0 * PI) + omega0 * (y[0] * y[0] + y[1] * y[1])],
        }
    }
}

fn write_pairs(v: &[[f64; 2]], dy: &mut [f64]) {
    for (i, p) in v.iter().enumerate() {
        dy[2 * i] = p[0];
        dy[2 * i + 1] = p[1];
    }
}

impl OdeRhs for Model {
    fn dim(&self) -> usize {
        Model::dim(self)
    }

    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.rhs(t, y, dy)?;
        if dy.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidState(format!("non-finite derivative at t = {t}")))
        }
    }
}
