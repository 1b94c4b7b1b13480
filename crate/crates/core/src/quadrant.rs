//! A single vortex in the quadrant `x > 0, y > 0` bounded by two walls.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::system::Domain;

fn check(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainViolation {
            index: 0,
            x,
            y,
            domain: Domain::Quadrant,
        })
    }
}

/// `H = (Γ²/2π) log(2xy/√(x²+y²))`.
pub fn hamiltonian_quadrant(gamma: f64, x: f64, y: f64) -> Result<f64> {
    check(x, y)?;
    Ok(gamma * gamma / (2.0 * PI) * (2.0 * x * y / x.hypot(y)).ln())
}

/// `(∂H/∂x, ∂H/∂y)` of [`hamiltonian_quadrant`].
pub fn hamiltonian_quadrant_gradient(gamma: f64, x: f64, y: f64) -> Result<[f64; 2]> {
    check(x, y)?;
    let k = gamma * gamma / (2.0 * PI);
    let r2 = x * x + y * y;
    Ok([k * (1.0 / x - x / r2), k * (1.0 / y - y / r2)])
}

/// `ẋ = (Γ/2π)(1/y − y/r²)`, `ẏ = −(Γ/2π)(1/x − x/r²)`.
pub fn velocity_quadrant(gamma: f64, x: f64, y: f64) -> Result<[f64; 2]> {
    check(x, y)?;
    let k = gamma / (2.0 * PI);
    let r2 = x * x + y * y;
    Ok([k * (1.0 / y - y / r2), -k * (1.0 / x - x / r2)])
}

/// Positive root of `4x²y²/(x²+y²) = C²`.
pub fn trajectory_constant(x: f64, y: f64) -> Result<f64> {
    check(x, y)?;
    Ok(2.0 * x * y / x.hypot(y))
}

/// Radius `C / sin 2θ` of the trajectory through polar angle `θ`.
pub fn polar_radius(c: f64, theta: f64) -> f64 {
    c / (2.0 * theta).sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn hand_values() {
        assert_relative_eq!(
            hamiltonian_quadrant(1.0, 1.0, 1.0).unwrap(),
            SQRT_2.ln() / (2.0 * PI),
            max_relative = 1e-15
        );
        let v = velocity_quadrant(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v[0], 1.0 / (4.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(v[1], -1.0 / (4.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(trajectory_constant(1.0, 1.0).unwrap(), SQRT_2, max_relative = 1e-15);
    }

    #[test]
    fn diagonal_and_polar_form() {
        let x = 2.5;
        let c = trajectory_constant(x, x).unwrap();
        assert_relative_eq!(c, SQRT_2 * x, max_relative = 1e-15);
        assert_relative_eq!(polar_radius(c, PI / 4.0), SQRT_2 * x, max_relative = 1e-15);
        let v = velocity_quadrant(0.7, x, x).unwrap();
        assert_relative_eq!(v[0], -v[1], max_relative = 1e-15);
    }

    #[test]
    fn rejects_walls() {
        assert!(hamiltonian_quadrant(1.0, 0.0, 1.0).is_err());
        assert!(velocity_quadrant(1.0, 1.0, -1.0).is_err());
        assert!(trajectory_constant(0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn symmetric_and_scaling(x in 0.05f64..20.0, y in 0.05f64..20.0, lam in 0.1f64..10.0, g in 0.1f64..3.0) {
            let h = hamiltonian_quadrant(g, x, y).unwrap();
            prop_assert!((h - hamiltonian_quadrant(g, y, x).unwrap()).abs() <= 1e-13 * (1.0 + h.abs()));
            let scaled = hamiltonian_quadrant(g, lam * x, lam * y).unwrap() - h;
            prop_assert!((scaled - g * g / (2.0 * PI) * lam.ln()).abs() <= 1e-12 * (1.0 + h.abs()));
        }

        #[test]
        fn velocity_tangent_to_level_sets(x in 0.05f64..20.0, y in 0.05f64..20.0, g in -3.0f64..3.0) {
            let v = velocity_quadrant(g, x, y).unwrap();
            let grad = hamiltonian_quadrant_gradient(g, x, y).unwrap();
            let scale = v[0].hypot(v[1]) * grad[0].hypot(grad[1]);
            prop_assert!((v[0] * grad[0] + v[1] * grad[1]).abs() <= 1e-12 * scale.max(1e-300));
            let r = velocity_quadrant(-g, x, y).unwrap();
            prop_assert_eq!(r, [-v[0], -v[1]]);
        }

        #[test]
        fn constant_is_exp_of_energy(x in 0.05f64..20.0, y in 0.05f64..20.0, g in 0.2f64..3.0) {
            let h = hamiltonian_quadrant(g, x, y).unwrap();
            let c = trajectory_constant(x, y).unwrap();
            prop_assert!(((2.0 * PI * h / (g * g)).exp() - c).abs() <= 1e-12 * c);
        }
    }
}
