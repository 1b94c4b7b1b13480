//! Dormand–Prince 8(5,3) embedded pair with 7th-order dense output.
//!
//! Coefficients are those of Hairer's DOP853: stages 1–12 advance the
//! solution, the 5th- and 3rd-order embedded estimates are combined into a
//! single error norm, and three extra stages (14–16) feed the interpolant.
#![allow(clippy::excessive_precision)]

use crate::error::Result;

const C: [f64; 16] = [
    0.0,
    0.526001519587677318785587544488E-01,
    0.789002279381515978178381316732E-01,
    0.118350341907227396726757197510E+00,
    0.281649658092772603273242802490E+00,
    0.333333333333333333333333333333E+00,
    0.25E+00,
    0.307692307692307692307692307692E+00,
    0.651282051282051282051282051282E+00,
    0.6E+00,
    0.857142857142857142857142857142E+00,
    1.0,
    1.0,
    0.1E+00,
    0.2E+00,
    0.777777777777777777777777777778E+00,
];

const A2: [f64; 1] = [5.26001519587677318785587544488E-2];
const A3: [f64; 2] = [1.97250569845378994544595329183E-2, 5.91751709536136983633785987549E-2];
const A4: [f64; 3] = [2.95875854768068491816892993775E-2, 0.0, 8.87627564304205475450678981324E-2];
const A5: [f64; 4] = [
    2.41365134159266685502369798665E-1,
    0.0,
    -8.84549479328286085344864962717E-1,
    9.24834003261792003115737966543E-1,
];
const A6: [f64; 5] = [
    3.7037037037037037037037037037E-2,
    0.0,
    0.0,
    1.70828608729473871279604482173E-1,
    1.25467687566822425016691814123E-1,
];
const A7: [f64; 6] = [
    3.7109375E-2,
    0.0,
    0.0,
    1.70252211019544039314978060272E-1,
    6.02165389804559606850219397283E-2,
    -1.7578125E-2,
];
const A8: [f64; 7] = [
    3.70920001185047927108779319836E-2,
    0.0,
    0.0,
    1.70383925712239993810214054705E-1,
    1.07262030446373284651809199168E-1,
    -1.53194377486244017527936158236E-2,
    8.27378916381402288758473766002E-3,
];
const A9: [f64; 8] = [
    6.24110958716075717114429577812E-1,
    0.0,
    0.0,
    -3.36089262944694129406857109825E0,
    -8.68219346841726006818189891453E-1,
    2.75920996994467083049415600797E1,
    2.01540675504778934086186788979E1,
    -4.34898841810699588477366255144E1,
];
const A10: [f64; 9] = [
    4.77662536438264365890433908527E-1,
    0.0,
    0.0,
    -2.48811461997166764192642586468E0,
    -5.90290826836842996371446475743E-1,
    2.12300514481811942347288949897E1,
    1.52792336328824235832596922938E1,
    -3.32882109689848629194453265587E1,
    -2.03312017085086261358222928593E-2,
];
const A11: [f64; 10] = [
    -9.3714243008598732571704021658E-1,
    0.0,
    0.0,
    5.18637242884406370830023853209E0,
    1.09143734899672957818500254654E0,
    -8.14978701074692612513997267357E0,
    -1.85200656599969598641566180701E1,
    2.27394870993505042818970056734E1,
    2.49360555267965238987089396762E0,
    -3.0467644718982195003823669022E0,
];
const A12: [f64; 11] = [
    2.27331014751653820792359768449E0,
    0.0,
    0.0,
    -1.05344954667372501984066689879E1,
    -2.00087205822486249909675718444E0,
    -1.79589318631187989172765950534E1,
    2.79488845294199600508499808837E1,
    -2.85899827713502369474065508674E0,
    -8.87285693353062954433549289258E0,
    1.23605671757943030647266201528E1,
    6.43392746015763530355970484046E-1,
];
const A14: [f64; 13] = [
    5.61675022830479523392909219681E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    2.53500210216624811088794765333E-1,
    -2.46239037470802489917441475441E-1,
    -1.24191423263816360469010140626E-1,
    1.5329179827876569731206322685E-1,
    8.20105229563468988491666602057E-3,
    7.56789766054569976138603589584E-3,
    -8.298E-3,
];
const A15: [f64; 14] = [
    3.18346481635021405060768473261E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    2.83009096723667755288322961402E-2,
    5.35419883074385676223797384372E-2,
    -5.49237485713909884646569340306E-2,
    0.0,
    0.0,
    -1.08347328697249322858509316994E-4,
    3.82571090835658412954920192323E-4,
    -3.40465008687404560802977114492E-4,
    1.41312443674632500278074618366E-1,
];
const A16: [f64; 15] = [
    -4.28896301583791923408573538692E-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -4.69762141536116384314449447206E0,
    7.68342119606259904184240953878E0,
    4.06898981839711007970213554331E0,
    3.56727187455281109270669543021E-1,
    0.0,
    0.0,
    0.0,
    -1.39902416515901462129418009734E-3,
    2.9475147891527723389556272149E0,
    -9.15095847217987001081870187138E0,
];

const B: [f64; 12] = [
    5.42937341165687622380535766363E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566E0,
    1.89151789931450038304281599044E0,
    -5.8012039600105847814672114227E0,
    3.1116436695781989440891606237E-1,
    -1.52160949662516078556178806805E-1,
    2.01365400804030348374776537501E-1,
    4.47106157277725905176885569043E-2,
];

const BHH: [f64; 3] = [
    0.244094488188976377952755905512E+00,
    0.733846688281611857341361741547E+00,
    0.220588235294117647058823529412E-01,
];

/// 5th-order error weights, indexed by stage (stages 2–5 vanish).
const ER: [f64; 12] = [
    0.1312004499419488073250102996E-01,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753E+01,
    -0.4957589496572501915214079952E+00,
    0.1664377182454986536961530415E+01,
    -0.3503288487499736816886487290E+00,
    0.3341791187130174790297318841E+00,
    0.8192320648511571246570742613E-01,
    -0.2235530786388629525884427845E-01,
];

/// Dense-output weights for the interpolant coefficients 4–7, indexed by
/// stage 1–16 (stage 13 is the derivative at the step end).
const D: [[f64; 16]; 4] = [
    [
        -0.84289382761090128651353491142E+01,
        0.0,
        0.0,
        0.0,
        0.0,
        0.56671495351937776962531783590E+00,
        -0.30689499459498916912797304727E+01,
        0.23846676565120698287728149680E+01,
        0.21170345824450282767155149946E+01,
        -0.87139158377797299206789907490E+00,
        0.22404374302607882758541771650E+01,
        0.63157877876946881815570249290E+00,
        -0.88990336451333310820698117400E-01,
        0.18148505520854727256656404962E+02,
        -0.91946323924783554000451984436E+01,
        -0.44360363875948939664310572000E+01,
    ],
    [
        0.10427508642579134603413151009E+02,
        0.0,
        0.0,
        0.0,
        0.0,
        0.24228349177525818288430175319E+03,
        0.16520045171727028198505394887E+03,
        -0.37454675472269020279518312152E+03,
        -0.22113666853125306036270938578E+02,
        0.77334326684722638389603898808E+01,
        -0.30674084731089398182061213626E+02,
        -0.93321305264302278729567221706E+01,
        0.15697238121770843886131091075E+02,
        -0.31139403219565177677282850411E+02,
        -0.93529243588444783865713862664E+01,
        0.35816841486394083752465898540E+02,
    ],
    [
        0.19985053242002433820987653617E+02,
        0.0,
        0.0,
        0.0,
        0.0,
        -0.38703730874935176555105901742E+03,
        -0.18917813819516756882830838328E+03,
        0.52780815920542364900561016686E+03,
        -0.11573902539959630126141871134E+02,
        0.68812326946963000169666922661E+01,
        -0.10006050966910838403183860980E+01,
        0.77771377980534432092869265740E+00,
        -0.27782057523535084065932004339E+01,
        -0.60196695231264120758267380846E+02,
        0.84320405506677161018159903784E+02,
        0.11992291136182789328035130030E+02,
    ],
    [
        -0.25693933462703749003312586129E+02,
        0.0,
        0.0,
        0.0,
        0.0,
        -0.15418974869023643374053993627E+03,
        -0.23152937917604549567536039109E+03,
        0.35763911791061412378285349910E+03,
        0.93405324183624310003907691704E+02,
        -0.37458323136451633156875139351E+02,
        0.10409964950896230045147246184E+03,
        0.29840293426660503123344363579E+02,
        -0.43533456590011143754432175058E+02,
        0.96324553959188282948394950600E+02,
        -0.39177261675615439165231486172E+02,
        -0.14972683625798562581422125276E+03,
    ],
];

fn stage_row(stage: usize) -> &'static [f64] {
    match stage {
        2 => &A2,
        3 => &A3,
        4 => &A4,
        5 => &A5,
        6 => &A6,
        7 => &A7,
        8 => &A8,
        9 => &A9,
        10 => &A10,
        11 => &A11,
        12 => &A12,
        14 => &A14,
        15 => &A15,
        16 => &A16,
        _ => unreachable!("stage {stage} has no coefficient row"),
    }
}

/// Right-hand side `dy = f(t, y)`. Errors mark points where the model is
/// undefined (collision, domain exit); the stepper treats them as a rejected
/// step and retries with a smaller step.
pub trait OdeRhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// Interpolating polynomial over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 8],
}

impl DenseStep {
    pub fn dim(&self) -> usize {
        self.rcont[0].len()
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t` (intended for `t0 ≤ t ≤ t0 + h`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let r = &self.rcont;
        for (i, o) in out.iter_mut().enumerate() {
            let p = r[4][i] + s * (r[5][i] + s1 * (r[6][i] + s * r[7][i]));
            *o = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * p)));
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.rcont[0].len()];
        self.eval_into(t, &mut out);
        out
    }
}

/// Step-size controller parameters (Hairer's defaults).
#[derive(Debug, Clone, Copy)]
struct Control {
    safety: f64,
    expo: f64,
    /// inverse of the smallest allowed shrink factor
    facc1: f64,
    /// inverse of the largest allowed growth factor
    facc2: f64,
}

const CONTROL: Control = Control {
    safety: 0.9,
    expo: 1.0 / 8.0,
    facc1: 1.0 / 0.333,
    facc2: 1.0 / 6.0,
};

/// Outcome of one attempted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub accepted: bool,
    /// Scaled error norm; the step is accepted iff it is `≤ 1`.
    pub error: f64,
    /// Proposed size of the next attempt.
    pub h_new: f64,
}

/// Reusable DOP853 workspace for one problem dimension.
pub struct Dop853 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    k: Vec<Vec<f64>>,
    ytmp: Vec<f64>,
    ynew: Vec<f64>,
    f_new: Vec<f64>,
    last_rejected: bool,
    /// `f(t, y)` at the start of the current step, valid when `Some`.
    f0_valid: bool,
}

impl Dop853 {
    pub fn new(dim: usize, rel_tol: f64, abs_tol: f64, max_step: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_step,
            k: vec![vec![0.0; dim]; 16],
            ytmp: vec![0.0; dim],
            ynew: vec![0.0; dim],
            f_new: vec![0.0; dim],
            last_rejected: false,
            f0_valid: false,
        }
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }

    /// Initial step guess from the local derivative scales.
    pub fn initial_step<F: OdeRhs>(&mut self, f: &F, t: f64, y: &[f64]) -> Result<f64> {
        let n = y.len();
        f.eval(t, y, &mut self.k[0])?;
        self.f0_valid = true;
        let (mut d0, mut d1) = (0.0, 0.0);
        for i in 0..n {
            let sc = self.scale(y[i], 0.0);
            d0 += (y[i] / sc).powi(2);
            d1 += (self.k[0][i] / sc).powi(2);
        }
        let mut h0 = if d0 <= 1e-10 || d1 <= 1e-10 {
            1e-6
        } else {
            0.01 * (d0 / d1).sqrt()
        };
        h0 = h0.min(self.max_step);
        for i in 0..n {
            self.ytmp[i] = y[i] + h0 * self.k[0][i];
        }
        let mut d2 = 0.0;
        if f.eval(t + h0, &self.ytmp, &mut self.f_new).is_ok() {
            for i in 0..n {
                let sc = self.scale(y[i], 0.0);
                d2 += ((self.f_new[i] - self.k[0][i]) / sc).powi(2);
            }
            d2 = d2.sqrt() / h0;
        } else {
            return Ok(h0 * 1e-3);
        }
        let dmax = d1.sqrt().max(d2);
        let h1 = if dmax <= 1e-15 {
            1e-6f64.max(h0 * 1e-3)
        } else {
            (0.01 / dmax).powf(1.0 / 8.0)
        };
        Ok((100.0 * h0).min(h1).min(self.max_step))
    }

    fn combine(&mut self, stage: usize, y: &[f64], h: f64) {
        let row = stage_row(stage);
        for i in 0..y.len() {
            let mut acc = 0.0;
            for (j, a) in row.iter().enumerate() {
                if *a != 0.0 {
                    acc += a * self.k[j][i];
                }
            }
            self.ytmp[i] = y[i] + h * acc;
        }
    }

    /// Attempts one step of size `h` from `(t, y)`. On acceptance `y` is
    /// overwritten with the new state and the interpolant is returned.
    pub fn step<F: OdeRhs>(
        &mut self,
        f: &F,
        t: f64,
        y: &mut [f64],
        h: f64,
    ) -> (StepResult, Option<DenseStep>) {
        match self.try_step(f, t, y, h) {
            Ok(r) => r,
            Err(_) => {
                // model undefined somewhere inside the step: shrink hard
                self.last_rejected = true;
                (
                    StepResult {
                        accepted: false,
                        error: f64::INFINITY,
                        h_new: 0.25 * h,
                    },
                    None,
                )
            }
        }
    }

    fn try_step<F: OdeRhs>(
        &mut self,
        f: &F,
        t: f64,
        y: &mut [f64],
        h: f64,
    ) -> Result<(StepResult, Option<DenseStep>)> {
        let n = y.len();
        if !self.f0_valid {
            f.eval(t, y, &mut self.k[0])?;
            self.f0_valid = true;
        }
        for stage in 2..=12 {
            self.combine(stage, y, h);
            let mut k = std::mem::take(&mut self.k[stage - 1]);
            let r = f.eval(t + C[stage - 1] * h, &self.ytmp, &mut k);
            self.k[stage - 1] = k;
            r?;
        }

        let (mut err, mut err2) = (0.0, 0.0);
        for i in 0..n {
            let mut inc = 0.0;
            let mut e5 = 0.0;
            for s in 0..12 {
                inc += B[s] * self.k[s][i];
                e5 += ER[s] * self.k[s][i];
            }
            self.ynew[i] = y[i] + h * inc;
            let e3 = inc - BHH[0] * self.k[0][i] - BHH[1] * self.k[8][i] - BHH[2] * self.k[11][i];
            let sc = self.scale(y[i], self.ynew[i]);
            err += (e5 / sc).powi(2);
            err2 += (e3 / sc).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };

        let fac11 = err.powf(CONTROL.expo);
        let fac = CONTROL.facc2.max(CONTROL.facc1.min(fac11 / CONTROL.safety));
        let mut h_new = h / fac;

        if err > 1.0 {
            self.last_rejected = true;
            let h_new = h / CONTROL.facc1.min(fac11 / CONTROL.safety);
            return Ok((
                StepResult {
                    accepted: false,
                    error: err,
                    h_new,
                },
                None,
            ));
        }

        // derivative at the new point (stage 13, also next step's stage 1)
        let mut fnew = std::mem::take(&mut self.k[12]);
        let r = f.eval(t + h, &self.ynew, &mut fnew);
        self.k[12] = fnew;
        r?;

        for stage in 14..=16 {
            self.combine(stage, y, h);
            let mut k = std::mem::take(&mut self.k[stage - 1]);
            let r = f.eval(t + C[stage - 1] * h, &self.ytmp, &mut k);
            self.k[stage - 1] = k;
            r?;
        }

        let mut rcont: [Vec<f64>; 8] = Default::default();
        for r in rcont.iter_mut() {
            *r = vec![0.0; n];
        }
        for i in 0..n {
            let ydiff = self.ynew[i] - y[i];
            let bspl = h * self.k[0][i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * self.k[12][i] - bspl;
            for (row, d) in D.iter().enumerate() {
                let mut acc = 0.0;
                for s in 0..16 {
                    if d[s] != 0.0 {
                        acc += d[s] * self.k[s][i];
                    }
                }
                rcont[4 + row][i] = h * acc;
            }
        }

        h_new = h_new.abs().min(self.max_step).copysign(h);
        if self.last_rejected {
            h_new = h_new.abs().min(h.abs()).copysign(h);
        }
        self.last_rejected = false;

        y.copy_from_slice(&self.ynew);
        self.k.swap(0, 12);
        Ok((
            StepResult {
                accepted: true,
                error: err,
                h_new,
            },
            Some(DenseStep { t0: t, h, rcont }),
        ))
    }
}
