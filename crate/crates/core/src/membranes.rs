//! Sphere-product membranes `Sᵐ(a) × Sˡ(b)` under the skew-mean-curvature
//! flow, where the shape reduces to the two radii.

use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereProductState {
    pub a: f64,
    pub b: f64,
    pub m: NonZeroU32,
    pub l: NonZeroU32,
}

impl SphereProductState {
    /// Panics if `m` or `l` is zero; use struct construction with
    /// `NonZeroU32` to handle that case explicitly.
    pub fn new(a: f64, b: f64, m: u32, l: u32) -> Self {
        Self {
            a,
            b,
            m: NonZeroU32::new(m).expect("m >= 1"),
            l: NonZeroU32::new(l).expect("l >= 1"),
        }
    }

    pub fn m(&self) -> f64 {
        self.m.get() as f64
    }

    pub fn l(&self) -> f64 {
        self.l.get() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) || !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidMembrane(format!(
                "radii must be positive, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// `(ȧ, ḃ) = (−l/b, m/a)`.
pub fn membrane_rhs(st: &SphereProductState) -> [f64; 2] {
    [-st.l() / st.b, st.m() / st.a]
}

/// Finite collapse time `a₀b₀/(l−m)` when `m < l`, otherwise `None`.
pub fn collapse_time(a0: f64, b0: f64, m: u32, l: u32) -> Option<f64> {
    (m < l).then(|| a0 * b0 / (l - m) as f64)
}

/// Exact radii at time `t`.
pub fn membrane_closed_form(a0: f64, b0: f64, m: u32, l: u32, t: f64) -> Result<[f64; 2]> {
    if let Some(tc) = collapse_time(a0, b0, m, l) {
        if t >= tc {
            return Err(Error::BeyondCollapse { t, collapse_time: tc });
        }
    }
    let (mf, lf) = (m as f64, l as f64);
    if m == l {
        let s = t / (a0 * b0);
        return Ok([a0 * (-lf * s).exp(), b0 * (mf * s).exp()]);
    }
    // a·b grows linearly: ab = a₀b₀ + (m−l)t
    let ratio = 1.0 + (mf - lf) * t / (a0 * b0);
    if ratio <= 0.0 {
        return Err(Error::BeyondCollapse {
            t,
            collapse_time: a0 * b0 / (lf - mf),
        });
    }
    Ok([a0 * ratio.powf(lf / (lf - mf)), b0 * ratio.powf(mf / (mf - lf))])
}

/// `ln(aᵐ bˡ)`, conserved by the flow.
pub fn membrane_volume_invariant(st: &SphereProductState) -> f64 {
    st.m() * st.a.ln() + st.l() * st.b.ln()
}
