//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the odd-indexed Kronrod nodes and the centre.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for [`integrate`]: stop once the summed error estimate is
/// below `max(abs_tol, rel_tol·|I|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// One GK15 panel on `[a, b]` for a vector of `N` integrands sharing nodes.
/// Returns the Kronrod values, the largest component-wise `|K − G|`, and
/// whether that difference is already at the rounding level of the panel.
fn panel<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> ([f64; N], f64, bool) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = [0.0; N];
    let mut g = [0.0; N];
    let mut abs = [0.0; N];
    for i in 0..N {
        k[i] = WGK[7] * fc[i];
        g[i] = WG[3] * fc[i];
        abs[i] = WGK[7] * fc[i].abs();
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            abs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    let mut floored = true;
    for i in 0..N {
        k[i] *= h;
        g[i] *= h;
        let diff = (k[i] - g[i]).abs();
        let floor = 50.0 * f64::EPSILON * (h * abs[i]).abs();
        if diff > floor {
            floored = false;
        }
        err = err.max(diff.max(floor));
    }
    (k, err, floored)
}

struct Interval<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: f64,
}

impl<const N: usize> PartialEq for Interval<N> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<const N: usize> Eq for Interval<N> {}
impl<const N: usize> PartialOrd for Interval<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Interval<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `N` functions over `[a, b]` simultaneously, bisecting the
/// panel with the largest error until every component meets `tol`. Panels
/// whose Kronrod–Gauss difference has reached rounding level are retired,
/// since splitting them cannot improve the estimate.
pub fn integrate_vec<const N: usize, F: Fn(f64) -> [f64; N]>(
    f: F,
    a: f64,
    b: f64,
    tol: QuadTol,
) -> [QuadResult; N] {
    let mut heap = BinaryHeap::new();
    let mut retired: Vec<Interval<N>> = Vec::new();
    let (v, e, floored) = panel(&f, a, b);
    let first = Interval { a, b, value: v, error: e };
    if floored {
        retired.push(first);
    } else {
        heap.push(first);
    }
    let mut total = v;
    let mut total_err = e;
    let mut count = 1;
    while let Some(worst) = heap.pop() {
        let target = total
            .iter()
            .map(|t| tol.abs_tol.max(tol.rel_tol * t.abs()))
            .fold(f64::INFINITY, f64::min);
        let mid = 0.5 * (worst.a + worst.b);
        if total_err <= target || count >= tol.max_intervals || mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1, f1) = panel(&f, worst.a, mid);
        let (v2, e2, f2) = panel(&f, mid, worst.b);
        for i in 0..N {
            total[i] += v1[i] + v2[i] - worst.value[i];
        }
        total_err += e1 + e2 - worst.error;
        count += 1;
        for (iv, fl) in [
            (Interval { a: worst.a, b: mid, value: v1, error: e1 }, f1),
            (Interval { a: mid, b: worst.b, value: v2, error: e2 }, f2),
        ] {
            if fl {
                retired.push(iv);
            } else {
                heap.push(iv);
            }
        }
    }
    // re-sum from the leaves so the running updates leave no residue
    let mut value = [0.0; N];
    let mut error = 0.0;
    for iv in heap.iter().chain(retired.iter()) {
        for i in 0..N {
            value[i] += iv.value[i];
        }
        error += iv.error;
    }
    std::array::from_fn(|i| QuadResult {
        value: value[i],
        error,
        intervals: count,
    })
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> QuadResult {
    let [r] = integrate_vec(|x| [f(x)], a, b, tol);
    r
}
