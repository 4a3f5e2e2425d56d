//! Dormand–Prince 8(5,3) on a complex state vector, parameter `t ∈ [t0, t1]`.

#![allow(clippy::excessive_precision)]

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::C64;
use crate::{Error, Result};

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;
const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;
const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;
const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;
const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 3.0;
const FAC_MAX: f64 = 6.0;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub atol: f64,
    pub rtol: f64,
    /// Initial step as a fraction of the interval.
    pub initial_step: f64,
    /// Largest step as a fraction of the interval.
    pub max_step: f64,
    /// Relative step size below which integration gives up.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self { atol: tol, rtol: tol, ..Self::default() }
    }
}

impl Default for Options {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-10, initial_step: 0.05, max_step: 1.0, min_step: 1e-14, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
    /// Sum of accepted local error estimates, in units of the tolerance.
    pub error_estimate: f64,
}

impl core::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evals += o.evals;
        self.error_estimate += o.error_estimate;
    }
}

fn axpy(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut s = C64::new(0.0, 0.0);
        for (a, k) in terms {
            s += k[i] * *a;
        }
        out[i] = y[i] + s * h;
    }
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` in place.
///
/// `accepted(t, y)` runs after every accepted step and may abort the
/// integration. A step-size underflow is reported as
/// [`Error::StepSizeUnderflow`] with `segment = 0`; callers relabel it.
pub fn integrate<F, G>(
    mut f: F,
    mut accepted: G,
    t0: f64,
    t1: f64,
    y: &mut [C64],
    opts: &Options,
) -> Result<Stats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    G: FnMut(f64, &[C64]) -> Result<()>,
{
    let n = y.len();
    let span = t1 - t0;
    let mut stats = Stats::default();
    if span == 0.0 || n == 0 {
        return Ok(stats);
    }
    let dir = span.signum();
    let mut k: Vec<Vec<C64>> = (0..10).map(|_| vec![C64::new(0.0, 0.0); n]).collect();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut t = t0;
    let mut h = opts.initial_step * span;
    let mut last_rejected = false;
    f(t, y, &mut k[0]);
    stats.evals += 1;

    loop {
        if (t1 - t) * dir <= 0.0 {
            return Ok(stats);
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NoConvergence("step limit reached".into()));
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < opts.min_step * span.abs() {
            return Err(Error::StepSizeUnderflow { segment: 0, t });
        }

        // k indices: 0=k1, 1=k2, ..., 9=k10; stage 11 and 12 reuse k2/k3 as in Hairer's code.
        macro_rules! stage {
            ($c:expr, $dst:expr, [$(($a:expr, $src:expr)),*]) => {{
                {
                    let terms: &[(f64, &[C64])] = &[$(($a, &k[$src][..])),*];
                    axpy(&mut tmp, y, h, terms);
                }
                f(t + $c * h, &tmp, &mut k[$dst]);
            }};
        }
        stage!(C2, 1, [(A21, 0)]);
        stage!(C3, 2, [(A31, 0), (A32, 1)]);
        stage!(C4, 3, [(A41, 0), (A43, 2)]);
        stage!(C5, 4, [(A51, 0), (A53, 2), (A54, 3)]);
        stage!(C6, 5, [(A61, 0), (A64, 3), (A65, 4)]);
        stage!(C7, 6, [(A71, 0), (A74, 3), (A75, 4), (A76, 5)]);
        stage!(C8, 7, [(A81, 0), (A84, 3), (A85, 4), (A86, 5), (A87, 6)]);
        stage!(C9, 8, [(A91, 0), (A94, 3), (A95, 4), (A96, 5), (A97, 6), (A98, 7)]);
        stage!(C10, 9, [(A101, 0), (A104, 3), (A105, 4), (A106, 5), (A107, 6), (A108, 7), (A109, 8)]);
        stage!(C11, 1, [(A111, 0), (A114, 3), (A115, 4), (A116, 5), (A117, 6), (A118, 7), (A119, 8), (A1110, 9)]);
        stage!(1.0, 2, [(A121, 0), (A124, 3), (A125, 4), (A126, 5), (A127, 6), (A128, 7), (A129, 8), (A1210, 9), (A1211, 1)]);
        stats.evals += 11;

        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..n {
            let incr = k[0][i] * B1
                + k[5][i] * B6
                + k[6][i] * B7
                + k[7][i] * B8
                + k[8][i] * B9
                + k[9][i] * B10
                + k[1][i] * B11
                + k[2][i] * B12;
            y_new[i] = y[i] + incr * h;
            let sk = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let e3 = incr - k[0][i] * BHH1 - k[8][i] * BHH2 - k[2][i] * BHH3;
            err2 += (e3 / sk).norm_sqr();
            let e5 = k[0][i] * ER1
                + k[5][i] * ER6
                + k[6][i] * ER7
                + k[7][i] * ER8
                + k[8][i] * ER9
                + k[9][i] * ER10
                + k[1][i] * ER11
                + k[2][i] * ER12;
            err += (e5 / sk).norm_sqr();
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err * (1.0 / (deno * n as f64)).sqrt();
        let fac11 = err.powf(1.0 / 8.0);
        let fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac11 / SAFE));
        let mut h_new = h / fac;

        if err <= 1.0 && err.is_finite() {
            let t_new = t + h;
            accepted(t_new, &y_new)?;
            y.copy_from_slice(&y_new);
            t = t_new;
            f(t, y, &mut k[0]);
            stats.evals += 1;
            stats.accepted += 1;
            stats.error_estimate += err;
            if last_rejected {
                h_new = if dir > 0.0 { h_new.min(h) } else { h_new.max(h) };
            }
            last_rejected = false;
        } else {
            h_new = h / (1.0 / FAC_MIN).min(if fac11.is_finite() { fac11 / SAFE } else { 1.0 / FAC_MIN });
            stats.rejected += 1;
            last_rejected = true;
        }
        h = dir * h_new.abs().min(opts.max_step * span.abs());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_to_tolerance() {
        let lam = C64::new(-0.4, 2.0);
        let mut y = vec![C64::new(1.0, 0.0)];
        let st = integrate(
            |_, y, dy| dy[0] = lam * y[0],
            |_, _| Ok(()),
            0.0,
            3.0,
            &mut y,
            &Options::with_tol(1e-12),
        )
        .unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-10);
        assert!(st.accepted > 3 && st.accepted < 200);
    }

    #[test]
    fn backwards_and_non_autonomous() {
        // y' = cos(t) y  →  y = exp(sin t).
        let mut y = vec![C64::new(1.0, 0.0)];
        integrate(|t, y, dy| dy[0] = y[0] * t.cos(), |_, _| Ok(()), 0.0, -4.0, &mut y, &Options::with_tol(1e-11))
            .unwrap();
        assert!((y[0].re - (-4.0f64).sin().exp()).abs() < 1e-9);
    }

    #[test]
    fn eighth_order_convergence_with_fixed_steps() {
        // Halving a forced step size shrinks the global error by ~2^8.
        let run = |steps: usize| {
            let mut y = vec![C64::new(1.0, 0.0)];
            let opts = Options { atol: 1e3, rtol: 1e3, initial_step: 1.0 / steps as f64, max_step: 1.0 / steps as f64, ..Options::default() };
            integrate(|t, y, dy| dy[0] = y[0] * (3.0 * t).cos() * 2.0, |_, _| Ok(()), 0.0, 1.0, &mut y, &opts).unwrap();
            (y[0].re - ((3.0f64).sin() * 2.0 / 3.0).exp()).abs()
        };
        let ratio = run(4) / run(8);
        assert!(ratio > 100.0, "ratio {ratio}");
    }

    #[test]
    fn callback_can_abort() {
        let mut y = vec![C64::new(1.0, 0.0)];
        let r = integrate(
            |_, y, dy| dy[0] = y[0],
            |t, _| if t > 0.5 { Err(Error::Singular) } else { Ok(()) },
            0.0,
            1.0,
            &mut y,
            &Options::default(),
        );
        assert!(matches!(r, Err(Error::Singular)));
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let mut y = vec![C64::new(1.0, 0.0)];
        let r = integrate(|_, y, dy| dy[0] = y[0] * y[0], |_, _| Ok(()), 0.0, 2.0, &mut y, &Options::default());
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })) || matches!(r, Err(Error::NoConvergence(_))));
    }
}
