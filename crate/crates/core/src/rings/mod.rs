//! Thin-cored coaxial vortex rings: Green function, self-induced speed,
//! equations of motion and first integrals.

pub mod elliptic;
pub mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::COINCIDENCE_TOL;
use quadrature::{integrate_vec, QuadTol};

/// Core radii above this fraction of `R` are rejected.
pub const MAX_CORE_RATIO: f64 = 0.2;
/// Core radii above this fraction of `R` only produce a warning.
pub const WARN_CORE_RATIO: f64 = 0.05;
/// Ring pairs closer than this (relative to the larger radius) are flagged.
pub const NEAR_SINGULAR_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub z: f64,
    pub r: f64,
    pub gamma: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSystem {
    pub rings: Vec<Ring>,
}

/// Non-fatal findings of [`RingSystem::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum RingWarning {
    ThickCore { index: usize, ratio: f64 },
    NearSingular { i: usize, j: usize, gap: f64 },
}

impl RingSystem {
    pub fn new(rings: Vec<Ring>) -> Self {
        Self { rings }
    }

    pub fn len(&self) -> usize {
        self.rings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rings.is_empty()
    }

    /// `[Z₀, R₀, Z₁, R₁, ...]`.
    pub fn flat_state(&self) -> Vec<f64> {
        self.rings.iter().flat_map(|r| [r.z, r.r]).collect()
    }

    /// Moves the rings to the `(Z, R)` pairs in `state`, keeping each core
    /// volume `a²R` fixed.
    pub fn moved_to(&self, state: &[f64]) -> Self {
        let rings = self
            .rings
            .iter()
            .zip(state.chunks_exact(2))
            .map(|(ring, zr)| Ring {
                z: zr[0],
                r: zr[1],
                gamma: ring.gamma,
                a: volume_conserving_core(ring.a * ring.a * ring.r, zr[1]),
            })
            .collect();
        Self { rings }
    }

    pub fn validate(&self) -> Result<Vec<RingWarning>> {
        if self.rings.is_empty() {
            return Err(Error::EmptySystem);
        }
        let mut warnings = Vec::new();
        for (index, ring) in self.rings.iter().enumerate() {
            let bad = |reason: &str| Error::InvalidRing {
                index,
                reason: reason.to_string(),
            };
            if !(ring.r > 0.0 && ring.r.is_finite()) {
                return Err(bad("radius must be positive"));
            }
            if !(ring.a > 0.0) {
                return Err(bad("core radius must be positive"));
            }
            if !ring.z.is_finite() || !ring.gamma.is_finite() {
                return Err(bad("non-finite position or circulation"));
            }
            if ring.gamma == 0.0 {
                return Err(Error::ZeroStrength { index });
            }
            let ratio = ring.a / ring.r;
            if ratio >= MAX_CORE_RATIO {
                return Err(bad("core radius must be below 0.2 R"));
            }
            if ratio > WARN_CORE_RATIO {
                warnings.push(RingWarning::ThickCore { index, ratio });
            }
        }
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let (a, b) = (&self.rings[i], &self.rings[j]);
                let gap = (a.z - b.z).hypot(a.r - b.r);
                if gap < COINCIDENCE_TOL {
                    return Err(Error::CoincidentRings { i, j });
                }
                let rel = gap / a.r.max(b.r);
                if rel < NEAR_SINGULAR_GAP {
                    warnings.push(RingWarning::NearSingular { i, j, gap: rel });
                }
            }
        }
        for w in &warnings {
            log::warn!("ring system: {w:?}");
        }
        Ok(warnings)
    }
}

/// Core radius `√(κ/R)` of a ring whose core volume is `∝ κ = a²R`.
pub fn volume_conserving_core(kappa: f64, r: f64) -> f64 {
    (kappa / r).sqrt()
}

fn check_pair(z: f64, r: f64, zp: f64, rp: f64) -> Result<()> {
    if !(r > 0.0) || !(rp > 0.0) {
        return Err(Error::InvalidRing {
            index: if r > 0.0 { 1 } else { 0 },
            reason: "radius must be positive".into(),
        });
    }
    if (z - zp).hypot(r - rp) < COINCIDENCE_TOL {
        return Err(Error::CoincidentRings { i: 0, j: 1 });
    }
    Ok(())
}

/// `θ`-integrals `[∫cosθ/s, ∫cosθ/s³, ∫cosθ(r − r'cosθ)/s³]` over `[0, 2π]`
/// with `s² = (z−z')² + r² + r'² − 2rr'cosθ`.
fn theta_integrals<const N: usize>(z: f64, r: f64, zp: f64, rp: f64) -> [f64; N] {
    let d2 = (z - zp).powi(2);
    let base = d2 + (r - rp).powi(2);
    let b = 4.0 * r * rp;
    let res: [_; N] = integrate_vec(
        |th: f64| {
            let (sh, c) = ((0.5 * th).sin(), th.cos());
            let s2 = base + b * sh * sh;
            let inv = 1.0 / s2.sqrt();
            let inv3 = inv / s2;
            let all = [c * inv, c * inv3, c * (r - rp * c) * inv3];
            std::array::from_fn::<f64, N, _>(|i| all[i])
        },
        0.0,
        PI,
        QuadTol::default(),
    );
    // integrand is even about θ = π
    std::array::from_fn(|i| 2.0 * res[i].value)
}

/// `G = (rr'/4π) ∫₀^{2π} cosθ dθ / √((z−z')² + r² + r'² − 2rr'cosθ)` by
/// adaptive quadrature; the reference evaluation.
pub fn green_ring(z: f64, r: f64, zp: f64, rp: f64) -> Result<f64> {
    check_pair(z, r, zp, rp)?;
    let [i0] = theta_integrals::<1>(z, r, zp, rp);
    Ok(r * rp / (4.0 * PI) * i0)
}

/// `(∂G/∂z, ∂G/∂r)` by quadrature of the differentiated integrand.
pub fn green_ring_grad(z: f64, r: f64, zp: f64, rp: f64) -> Result<[f64; 2]> {
    check_pair(z, r, zp, rp)?;
    let [i0, i1, i2] = theta_integrals::<3>(z, r, zp, rp);
    let k = 1.0 / (4.0 * PI);
    Ok([-k * r * rp * (z - zp) * i1, k * rp * i0 - k * r * rp * i2])
}

struct EllipticPair {
    d: f64,
    s: f64,
    m: f64,
    f: f64,
    df: f64,
}

fn elliptic_pair(z: f64, r: f64, zp: f64, rp: f64) -> EllipticPair {
    let d = z - zp;
    let s2 = d * d + (r + rp).powi(2);
    let m = 4.0 * r * rp / s2;
    let m1 = (d * d + (r - rp).powi(2)) / s2;
    let (f, df) = elliptic::ring_f(m, m1);
    EllipticPair {
        d,
        s: s2.sqrt(),
        m,
        f,
        df,
    }
}

/// Closed form `G = (S/4π)[(2−m)K(m) − 2E(m)]`, `S² = (z−z')² + (r+r')²`,
/// `m = 4rr'/S²`.
pub fn green_ring_fast(z: f64, r: f64, zp: f64, rp: f64) -> Result<f64> {
    check_pair(z, r, zp, rp)?;
    let p = elliptic_pair(z, r, zp, rp);
    Ok(p.s * p.f / (4.0 * PI))
}

/// Closed-form `(∂G/∂z, ∂G/∂r)`.
pub fn green_ring_grad_fast(z: f64, r: f64, zp: f64, rp: f64) -> Result<[f64; 2]> {
    check_pair(z, r, zp, rp)?;
    let p = elliptic_pair(z, r, zp, rp);
    let k = 1.0 / (4.0 * PI);
    let dgdz = k * p.d / p.s * (p.f - 2.0 * p.m * p.df);
    let s_r = (r + rp) / p.s;
    let m_r = p.m / r - 2.0 * p.m * (r + rp) / (p.s * p.s);
    Ok([dgdz, k * (s_r * p.f + p.s * p.df * m_r)])
}

/// `V = (Γ/4πR)[log(8R/a) − 1/4]`.
pub fn ring_self_speed(gamma: f64, r: f64, a: f64) -> f64 {
    gamma / (4.0 * PI * r) * ((8.0 * r / a).ln() - 0.25)
}

/// `(Żᵢ, Ṙᵢ)` with `Żᵢ = Vᵢ + (1/ΓᵢRᵢ)∂U/∂Rᵢ`, `Ṙᵢ = −(1/ΓᵢRᵢ)∂U/∂Zᵢ`.
pub fn velocity_rings(s: &RingSystem) -> Result<Vec<[f64; 2]>> {
    let n = s.len();
    let mut v: Vec<[f64; 2]> = s
        .rings
        .iter()
        .map(|ring| [ring_self_speed(ring.gamma, ring.r, ring.a), 0.0])
        .collect();
    for i in 0..n {
        let ri = &s.rings[i];
        for j in 0..n {
            if i == j {
                continue;
            }
            let rj = &s.rings[j];
            let [gz, gr] = green_ring_grad_fast(ri.z, ri.r, rj.z, rj.r)
                .map_err(|_| Error::CoincidentRings { i: i.min(j), j: i.max(j) })?;
            // ∂U/∂Rᵢ = (1/π) Σⱼ ΓᵢΓⱼ ∂G/∂r, divided by ΓᵢRᵢ
            let c = rj.gamma / (PI * ri.r);
            v[i][0] += c * gr;
            v[i][1] -= c * gz;
        }
    }
    Ok(v)
}

/// `U = (1/2π) Σ_{i≠j} ΓᵢΓⱼ G(Zᵢ, Rᵢ, Zⱼ, Rⱼ)` over ordered pairs.
pub fn interaction_energy(s: &RingSystem) -> Result<f64> {
    let n = s.len();
    let mut u = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&s.rings[i], &s.rings[j]);
            let g = green_ring_fast(a.z, a.r, b.z, b.r).map_err(|_| Error::CoincidentRings { i, j })?;
            u += a.gamma * b.gamma * g / PI;
        }
    }
    Ok(u)
}

/// `H = Σ (Γᵢ²/4π) Rᵢ [log(8Rᵢ/aᵢ) − 7/4] + U`.
pub fn hamiltonian_rings(s: &RingSystem) -> Result<f64> {
    let own: f64 = s
        .rings
        .iter()
        .map(|r| r.gamma * r.gamma / (4.0 * PI) * r.r * ((8.0 * r.r / r.a).ln() - 1.75))
        .sum();
    Ok(own + interaction_energy(s)?)
}

/// `Σ Γᵢ Rᵢ²`.
pub fn ring_moment(s: &RingSystem) -> f64 {
    s.rings.iter().map(|r| r.gamma * r.r * r.r).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ring(z: f64, r: f64, gamma: f64, a: f64) -> Ring {
        Ring { z, r, gamma, a }
    }

    #[test]
    fn green_symmetry_and_decay() {
        let g1 = green_ring(0.0, 1.0, 3.0, 2.0).unwrap();
        let g2 = green_ring(3.0, 2.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(g1, g2, max_relative = 1e-12);
        assert!(green_ring(0.0, 1.0, 1e3, 1.0).unwrap() < 1e-6);
        assert!(green_ring(0.0, 1.0, 0.0, 1.01).unwrap() > green_ring(0.0, 1.0, 0.0, 1.1).unwrap());
        assert_eq!(green_ring(0.0, 1.0, 0.0, 1.0), Err(Error::CoincidentRings { i: 0, j: 1 }));
    }

    #[test]
    fn fast_path_matches_quadrature() {
        for &(z, r, zp, rp) in &[(0.0, 1.0, 3.0, 2.0), (0.0, 1.0, 0.0, 1.01), (0.5, 0.1, 9.0, 10.0), (0.0, 1.0, 1e3, 1.0)] {
            let q = green_ring(z, r, zp, rp).unwrap();
            let f = green_ring_fast(z, r, zp, rp).unwrap();
            assert_relative_eq!(q, f, max_relative = 1e-10);
            let gq = green_ring_grad(z, r, zp, rp).unwrap();
            let gf = green_ring_grad_fast(z, r, zp, rp).unwrap();
            for c in 0..2 {
                assert!((gq[c] - gf[c]).abs() <= 1e-9 * gq[0].abs().max(gq[1].abs()));
            }
        }
    }

    #[test]
    fn gradient_structure() {
        let g = green_ring_grad_fast(0.0, 1.0, 1.0, 2.0).unwrap();
        let m = green_ring_grad_fast(1.0, 1.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(g[0], -m[0], max_relative = 1e-14);
        assert_eq!(green_ring_grad_fast(2.0, 1.0, 2.0, 1.5).unwrap()[0], 0.0);
        let h = 1e-5;
        let fd_z = (green_ring_fast(h, 1.0, 1.0, 2.0).unwrap() - green_ring_fast(-h, 1.0, 1.0, 2.0).unwrap()) / (2.0 * h);
        let fd_r = (green_ring_fast(0.0, 1.0 + h, 1.0, 2.0).unwrap() - green_ring_fast(0.0, 1.0 - h, 1.0, 2.0).unwrap()) / (2.0 * h);
        assert_relative_eq!(g[0], fd_z, max_relative = 1e-7);
        assert_relative_eq!(g[1], fd_r, max_relative = 1e-7);
    }

    #[test]
    fn self_speed_values() {
        let a = 8.0 * (-1.25f64).exp();
        assert_relative_eq!(ring_self_speed(4.0 * PI, 1.0, a), 1.0, max_relative = 1e-14);
        assert_relative_eq!(ring_self_speed(4.0 * PI, 1.0, 0.01), 800f64.ln() - 0.25, max_relative = 1e-14);
        assert_relative_eq!(ring_self_speed(4.0 * PI, 1.0, 0.01), 6.43461, max_relative = 1e-6);
        assert_eq!(ring_self_speed(-2.0, 1.5, 0.01), -ring_self_speed(2.0, 1.5, 0.01));
    }

    #[test]
    fn single_ring() {
        let s = RingSystem::new(vec![ring(0.3, 1.0, 2.0, 0.01)]);
        assert_eq!(velocity_rings(&s).unwrap(), vec![[ring_self_speed(2.0, 1.0, 0.01), 0.0]]);
        let a = 8.0 * (-1.75f64).exp();
        let s = RingSystem::new(vec![ring(0.0, 1.0, (4.0 * PI).sqrt(), a)]);
        assert!(hamiltonian_rings(&s).unwrap().abs() < 1e-15);
        assert_eq!(ring_moment(&RingSystem::new(vec![ring(0.0, 3.0, 2.0, 0.1)])), 18.0);
    }

    #[test]
    fn identical_pair_exchanges_radius() {
        let s = RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.05), ring(0.4, 1.0, 1.0, 0.05)]);
        let v = velocity_rings(&s).unwrap();
        assert_relative_eq!(v[0][1], -v[1][1], max_relative = 1e-14);
        assert!(v[0][1] < 0.0, "trailing ring contracts");
    }

    #[test]
    fn hamiltonian_form_with_volume_conserving_cores() {
        let s = RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.05), ring(0.5, 1.3, 0.7, 0.04)]);
        let v = velocity_rings(&s).unwrap();
        let y = s.flat_state();
        let h = 1e-6;
        for i in 0..2 {
            let mut grad = [0.0; 2];
            for c in 0..2 {
                let (mut p, mut m) = (y.clone(), y.clone());
                p[2 * i + c] += h;
                m[2 * i + c] -= h;
                grad[c] = (hamiltonian_rings(&s.moved_to(&p)).unwrap() - hamiltonian_rings(&s.moved_to(&m)).unwrap()) / (2.0 * h);
            }
            let gr = s.rings[i].gamma * s.rings[i].r;
            assert_relative_eq!(gr * v[i][0], grad[1], max_relative = 1e-7);
            assert_relative_eq!(gr * v[i][1], -grad[0], max_relative = 1e-6);
        }
    }

    #[test]
    fn validation() {
        assert!(RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.3)]).validate().is_err());
        let w = RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.1)]).validate().unwrap();
        assert!(matches!(w[0], RingWarning::ThickCore { .. }));
        let s = RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.01), ring(0.0, 1.0, 1.0, 0.01)]);
        assert_eq!(s.validate(), Err(Error::CoincidentRings { i: 0, j: 1 }));
        let s = RingSystem::new(vec![ring(0.0, 1.0, 1.0, 0.01), ring(0.0, 1.0005, 1.0, 0.01)]);
        assert!(matches!(s.validate().unwrap()[0], RingWarning::NearSingular { .. }));
    }
}
