//! Complete elliptic integrals and the combination `F(m) = (2−m)K − 2E`
//! that the ring Green function reduces to.

use std::f64::consts::FRAC_PI_2;

/// `K(m)` and `E(m)` by the arithmetic–geometric mean, parameter convention
/// `K(m) = ∫₀^{π/2} (1 − m sin²φ)^{−1/2} dφ`. The complement `m1 = 1 − m` is
/// passed separately so callers can supply it without cancellation.
pub fn ellip_ke(m: f64, m1: f64) -> (f64, f64) {
    debug_assert!((0.0..1.0).contains(&m) && m1 > 0.0);
    let mut a = 1.0;
    let mut g = m1.sqrt();
    let mut c2_sum = 0.5 * m; // 2^{-1} c0², c0² = m
    let mut pow2 = 0.5;
    for _ in 0..40 {
        let c = 0.5 * (a - g);
        let an = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = an;
        pow2 *= 2.0;
        c2_sum += pow2 * c * c;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - c2_sum))
}

/// Below this `m` the power series is used for `F` and `F'`.
const SERIES_LIMIT: f64 = 0.3;

/// Coefficients `c_n` with `F(m) = (π/2) Σ c_n mⁿ`; `c_n = a_{n−1}(n−1)/n`
/// where `a_n = ((2n−1)!!/(2n)!!)²` are the `K` series coefficients.
fn series(m: f64) -> (f64, f64) {
    let mut a_prev = 1.0; // a_0
    let mut f = 0.0;
    let mut df = 0.0;
    let mut mpow = m; // m^{n-1}
    for n in 2..200 {
        let nf = n as f64;
        // a_{n-1} from a_{n-2}
        let q = (2.0 * nf - 3.0) / (2.0 * nf - 2.0);
        a_prev *= q * q;
        let c = a_prev * (nf - 1.0) / nf;
        let term = c * mpow * m;
        f += term;
        df += nf * c * mpow;
        if term < 1e-18 * f {
            break;
        }
        mpow *= m;
    }
    (FRAC_PI_2 * f, FRAC_PI_2 * df)
}

/// `F(m) = (2−m)K(m) − 2E(m)` and its derivative `F'(m)`.
pub fn ring_f(m: f64, m1: f64) -> (f64, f64) {
    if m < SERIES_LIMIT {
        return series(m);
    }
    let (k, e) = ellip_ke(m, m1);
    let f = (2.0 - m) * k - 2.0 * e;
    let dk = (e - m1 * k) / (2.0 * m * m1);
    let de = (e - k) / (2.0 * m);
    (f, -k + (2.0 - m) * dk - 2.0 * de)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let (k, e) = ellip_ke(0.0, 1.0);
        assert!((k - FRAC_PI_2).abs() < 1e-16 && (e - FRAC_PI_2).abs() < 1e-16);
        // K(1/2), E(1/2) reference values
        let (k, e) = ellip_ke(0.5, 0.5);
        assert!((k - 1.854_074_677_301_372).abs() < 1e-15);
        assert!((e - 1.350_643_881_047_675_5).abs() < 1e-15);
        // Legendre relation at m = 1/2: 2EK − K² = π/2
        assert!((2.0 * e * k - k * k - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn series_meets_closed_form() {
        for &m in &[0.25, 0.29, 0.3] {
            let (k, e) = ellip_ke(m, 1.0 - m);
            let direct = (2.0 - m) * k - 2.0 * e;
            let (fs, dfs) = series(m);
            assert!((fs - direct).abs() < 1e-13 * direct, "{m}");
            let h = 1e-5;
            let (fp, _) = ring_f(m + h, 1.0 - m - h);
            let (fm, _) = ring_f(m - h, 1.0 - m + h);
            assert!((dfs - (fp - fm) / (2.0 * h)).abs() < 1e-8 * dfs);
        }
    }

    #[test]
    fn derivative_closed_form_matches_difference() {
        for &m in &[0.4, 0.7, 0.95, 0.999] {
            let (_, df) = ring_f(m, 1.0 - m);
            let h = 1e-6 * (1.0 - m);
            let (fp, _) = ring_f(m + h, 1.0 - m - h);
            let (fm, _) = ring_f(m - h, 1.0 - m + h);
            assert!((df - (fp - fm) / (2.0 * h)).abs() < 1e-6 * df.abs(), "{m}");
        }
    }
}
