//! N vortices in the unbounded plane.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::system::{Domain, VortexSystem, COINCIDENCE_TOL};

fn require_plane(s: &VortexSystem) -> Result<()> {
    if s.domain != Domain::Plane {
        return Err(Error::Validation(format!(
            "expected a plane system, got {:?}",
            s.domain
        )));
    }
    Ok(())
}

fn separation_sq(s: &VortexSystem, i: usize, j: usize) -> Result<f64> {
    let [xi, yi] = s.positions[i];
    let [xj, yj] = s.positions[j];
    let l2 = (xi - xj).powi(2) + (yi - yj).powi(2);
    if l2 < COINCIDENCE_TOL * COINCIDENCE_TOL {
        return Err(Error::CoincidentVortices {
            i: i.min(j),
            j: i.max(j),
            distance: l2.sqrt(),
        });
    }
    Ok(l2)
}

/// Induced velocity of every vortex:
/// `ẋᵢ = −(1/2π) Σ Γⱼ (yᵢ−yⱼ)/lᵢⱼ²`, `ẏᵢ = (1/2π) Σ Γⱼ (xᵢ−xⱼ)/lᵢⱼ²`.
pub fn velocity_plane(s: &VortexSystem) -> Result<Vec<[f64; 2]>> {
    require_plane(s)?;
    let n = s.len();
    let mut v = vec![[0.0; 2]; n];
    for i in 0..n {
        let [xi, yi] = s.positions[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let [xj, yj] = s.positions[j];
            let l2 = separation_sq(s, i, j)?;
            let g = s.strengths[j] / (2.0 * PI * l2);
            v[i][0] -= g * (yi - yj);
            v[i][1] += g * (xi - xj);
        }
    }
    Ok(v)
}

/// `H = −(1/4π) Σ_{i≠j} ΓᵢΓⱼ log lᵢⱼ` over ordered pairs.
pub fn hamiltonian_plane(s: &VortexSystem) -> Result<f64> {
    require_plane(s)?;
    let n = s.len();
    let mut h = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let l2 = separation_sq(s, i, j)?;
            // two ordered pairs, log l = ½ log l²
            h -= s.strengths[i] * s.strengths[j] * l2.ln() / (4.0 * PI);
        }
    }
    Ok(h)
}

/// Analytic `(∂H/∂xᵢ, ∂H/∂yᵢ)`; satisfies `Γᵢẋᵢ = ∂H/∂yᵢ`, `Γᵢẏᵢ = −∂H/∂xᵢ`.
pub fn hamiltonian_plane_gradient(s: &VortexSystem) -> Result<Vec<[f64; 2]>> {
    require_plane(s)?;
    let n = s.len();
    let mut grad = vec![[0.0; 2]; n];
    for i in 0..n {
        let [xi, yi] = s.positions[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let [xj, yj] = s.positions[j];
            let l2 = separation_sq(s, i, j)?;
            let c = -s.strengths[i] * s.strengths[j] / (2.0 * PI * l2);
            grad[i][0] += c * (xi - xj);
            grad[i][1] += c * (yi - yj);
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::E;

    #[test]
    fn single_vortex_is_stationary() {
        let s = VortexSystem::plane(vec![3.0], vec![[1.0, 2.0]]);
        assert_eq!(velocity_plane(&s).unwrap(), vec![[0.0, 0.0]]);
    }

    #[test]
    fn corotating_pair_velocity() {
        let s = VortexSystem::plane(vec![1.0, 1.0], vec![[1.0, 0.0], [-1.0, 0.0]]);
        let v = velocity_plane(&s).unwrap();
        assert_relative_eq!(v[0][0], 0.0);
        assert_relative_eq!(v[0][1], 1.0 / (4.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(v[1][1], -1.0 / (4.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn dipole_translates_along_bisector() {
        let s = VortexSystem::plane(vec![1.0, -1.0], vec![[0.0, 0.0], [1.0, 0.0]]);
        let v = velocity_plane(&s).unwrap();
        let speed = (0.5f64 * (1.0 + 1.0)).sqrt() / (2.0 * PI);
        assert_eq!(v[0], v[1]);
        assert_relative_eq!(v[0][0], 0.0);
        assert_relative_eq!(v[0][1].abs(), speed, max_relative = 1e-15);
    }

    #[test]
    fn hamiltonian_hand_values() {
        let unit = VortexSystem::plane(vec![1.0, 1.0], vec![[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(hamiltonian_plane(&unit).unwrap(), 0.0);
        let same = VortexSystem::plane(vec![1.0, 1.0], vec![[0.0, 0.0], [E, 0.0]]);
        assert_relative_eq!(hamiltonian_plane(&same).unwrap(), -1.0 / (2.0 * PI), max_relative = 1e-14);
        let dip = VortexSystem::plane(vec![1.0, -1.0], vec![[0.0, 0.0], [E, 0.0]]);
        assert_relative_eq!(hamiltonian_plane(&dip).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn gradient_consistent_with_velocity() {
        let s = VortexSystem::plane(vec![1.0, 1.0], vec![[1.0, 0.0], [-1.0, 0.0]]);
        let g = hamiltonian_plane_gradient(&s).unwrap();
        assert_eq!(g[0][0], -g[1][0]);
        assert_eq!(g[0][1], 0.0);
        assert_relative_eq!(-g[0][0], 1.0 / (4.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn coincident_pair_errors() {
        let s = VortexSystem::plane(vec![1.0, 1.0], vec![[0.5, 0.5], [0.5, 0.5]]);
        assert!(matches!(velocity_plane(&s), Err(Error::CoincidentVortices { .. })));
        assert!(matches!(hamiltonian_plane(&s), Err(Error::CoincidentVortices { .. })));
    }

    fn rotate(p: [f64; 2], a: f64) -> [f64; 2] {
        [p[0] * a.cos() - p[1] * a.sin(), p[0] * a.sin() + p[1] * a.cos()]
    }

    proptest! {
        #[test]
        fn velocity_equivariant(
            pts in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0, 0.2f64..2.0), 2..5),
            angle in 0.0f64..6.3,
            shift in (-3.0f64..3.0, -3.0f64..3.0),
        ) {
            let s = VortexSystem::plane(
                pts.iter().map(|p| p.2).collect(),
                pts.iter().map(|p| [p.0, p.1]).collect(),
            );
            prop_assume!(s.validate().is_ok());
            let min_sep = (0..s.len()).flat_map(|i| (i+1..s.len()).map(move |j| (i, j)))
                .map(|(i, j)| s.distance(i, j)).fold(f64::INFINITY, f64::min);
            prop_assume!(min_sep > 0.05);
            let v = velocity_plane(&s).unwrap();
            let moved = VortexSystem::plane(
                s.strengths.clone(),
                s.positions.iter().map(|&p| {
                    let r = rotate(p, angle);
                    [r[0] + shift.0, r[1] + shift.1]
                }).collect(),
            );
            let w = velocity_plane(&moved).unwrap();
            let scale: f64 = v.iter().map(|u| u[0].hypot(u[1])).fold(0.0, f64::max).max(1e-12);
            for (vi, wi) in v.iter().zip(&w) {
                let r = rotate(*vi, angle);
                prop_assert!((r[0] - wi[0]).abs() <= 1e-9 * scale);
                prop_assert!((r[1] - wi[1]).abs() <= 1e-9 * scale);
            }
        }
    }
}
