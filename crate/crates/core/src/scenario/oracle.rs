//! Seeded comparison of the closed-form ring Green function against
//! brute-force quadrature, plus a finite-difference check of its gradient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rings::{green_ring, green_ring_fast, green_ring_grad_fast};

/// Pass threshold for the value comparison.
pub const GREEN_REL_TOL: f64 = 1e-9;
/// Pass threshold for the finite-difference gradient check.
pub const GRADIENT_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub samples: usize,
    pub seed: u64,
    pub max_rel_diff: f64,
    /// `(z, r, z', r')` at which `max_rel_diff` occurred.
    pub worst_input: [f64; 4],
    pub max_gradient_rel_err: f64,
    pub pass: bool,
}

/// `n` inputs with `r, r' ∈ [0.1, 10]`, `|z − z'| ∈ [0, 10]`, `z = 0`.
pub fn green_inputs(n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rng.gen_range(0.1..=10.0);
            let rp = rng.gen_range(0.1..=10.0);
            let gap: f64 = rng.gen_range(0.0..=10.0);
            let zp = if rng.gen_bool(0.5) { gap } else { -gap };
            [0.0, r, zp, rp]
        })
        .collect()
}

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

/// Relative error of the analytic `(∂G/∂z, ∂G/∂r)` against finite differences.
///
/// The step is tied to the distance from the log singularity at
/// `(z, r) = (z', r')` so the stencil never straddles it.
pub fn green_gradient_fd_error(p: [f64; 4]) -> Result<f64> {
    let [z, r, zp, rp] = p;
    let gap = (z - zp).hypot(r - rp);
    let h = 1e-3 * gap.min(r);
    let g = green_ring_grad_fast(z, r, zp, rp)?;
    let dz = central_difference(|x| green_ring_fast(x, r, zp, rp), z, h)?;
    let dr = central_difference(|x| green_ring_fast(z, x, zp, rp), r, h)?;
    let norm = g[0].hypot(g[1]);
    Ok((g[0] - dz).hypot(g[1] - dr) / norm)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn green_oracle_suite(samples: usize, seed: u64) -> Result<OracleReport> {
    let inputs = green_inputs(samples, seed);
    let per_sample: Vec<(f64, f64)> = inputs
        .par_iter()
        .map(|&[z, r, zp, rp]| {
            let quad = green_ring(z, r, zp, rp)?;
            let fast = green_ring_fast(z, r, zp, rp)?;
            Ok((rel_diff(fast, quad), green_gradient_fd_error([z, r, zp, rp])?))
        })
        .collect::<Result<_>>()?;
    let mut max_rel_diff: f64 = 0.0;
    let mut worst_input = inputs.first().copied().unwrap_or([f64::NAN; 4]);
    let mut max_gradient_rel_err: f64 = 0.0;
    for (p, (d, g)) in inputs.iter().zip(&per_sample) {
        if *d > max_rel_diff {
            max_rel_diff = *d;
            worst_input = *p;
        }
        max_gradient_rel_err = max_gradient_rel_err.max(*g);
    }
    Ok(OracleReport {
        samples,
        seed,
        max_rel_diff,
        worst_input,
        max_gradient_rel_err,
        pass: max_rel_diff < GREEN_REL_TOL && max_gradient_rel_err < GRADIENT_REL_TOL,
    })
}
