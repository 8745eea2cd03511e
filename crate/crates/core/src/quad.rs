//! Adaptive Gauss-Kronrod quadrature, principal values, Brent root finding
//! and Brent minimization.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by every integral in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_evals: 1_000_000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PVResult {
    pub principal_value: f64,
    /// `f_num(pole) / |f_den'(pole)|`.
    pub residue_coefficient: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod rule with the QUADPACK error heuristic.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive quadrature on `[a, b]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(a < b) {
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 1,
            });
        }
        return Err(Error::Domain(format!("integration interval [{a}, {b}] is reversed")));
    }
    let (v, e) = gk15(&f, a, b);
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, err: e });
    let mut total = v;
    let mut total_err = e;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::NonConvergence {
                value: total,
                error_estimate: total_err,
                evaluations: evals,
            });
        }
        if total_err <= (cfg.rel_tol * total.abs()).max(cfg.abs_tol) {
            break;
        }
        if evals + 30 > cfg.max_evals {
            return Err(Error::NonConvergence {
                value: total,
                error_estimate: total_err,
                evaluations: evals,
            });
        }
        let worst = heap.pop().expect("segment heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; accept its estimate.
            total_err -= worst.err;
            heap.push(Segment { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    let segs = heap.into_vec();
    let value = segs.iter().map(|s| s.value).sum();
    let error_estimate = segs.iter().map(|s| s.err).sum();
    Ok(QuadResult {
        value,
        error_estimate,
        evaluations: evals,
    })
}

/// `∫_a^∞ f` through `x = a + t/(1-t)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    integrate_semi_infinite_scaled(f, a, 1.0, cfg)
}

/// `∫_a^∞ f` through `x = a + s·t/(1-t)`; `s` should match the decay length.
pub fn integrate_semi_infinite_scaled<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    s: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let g = |t: f64| {
        let u = 1.0 - t;
        let x = a + s * t / u;
        if x.is_infinite() {
            return 0.0;
        }
        f(x) * s / (u * u)
    };
    integrate_finite(g, 0.0, 1.0, cfg)
}

/// Principal value of `∫_a^b f_num/f_den` across a simple zero of `f_den`,
/// with the slope at the pole estimated by finite differences.
pub fn integrate_principal_value<N, D>(
    f_num: N,
    f_den: D,
    pole: f64,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<PVResult>
where
    N: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_bracket(&f_den, pole, a, b)?;
    let w = 0.5 * (pole - a).min(b - pole);
    let h = 1e-3 * w;
    let slope = (f_den(pole - 2.0 * h) - 8.0 * f_den(pole - h) + 8.0 * f_den(pole + h)
        - f_den(pole + 2.0 * h))
        / (12.0 * h);
    pv_core(&f_num, &f_den, pole, slope, a, b, w, cfg)
}

/// As [`integrate_principal_value`] with a known `f_den'(pole)`.
pub fn integrate_principal_value_with_slope<N, D>(
    f_num: N,
    f_den: D,
    pole: f64,
    slope: f64,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<PVResult>
where
    N: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_bracket(&f_den, pole, a, b)?;
    let w = 0.5 * (pole - a).min(b - pole);
    pv_core(&f_num, &f_den, pole, slope, a, b, w, cfg)
}

/// Same as [`integrate_principal_value_with_slope`] with an explicit
/// half-width of the symmetric subtraction window.
#[allow(clippy::too_many_arguments)]
pub fn integrate_principal_value_window<N, D>(
    f_num: N,
    f_den: D,
    pole: f64,
    slope: f64,
    a: f64,
    b: f64,
    half_width: f64,
    cfg: &QuadConfig,
) -> Result<PVResult>
where
    N: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    check_bracket(&f_den, pole, a, b)?;
    if !(half_width > 0.0 && pole - half_width >= a && pole + half_width <= b) {
        return Err(Error::Domain(format!(
            "window half-width {half_width} does not fit in [{a}, {b}] around {pole}"
        )));
    }
    pv_core(&f_num, &f_den, pole, slope, a, b, half_width, cfg)
}

fn check_bracket<D: Fn(f64) -> f64>(f_den: &D, pole: f64, a: f64, b: f64) -> Result<()> {
    if !(a < pole && pole < b) || !(f_den(a) * f_den(b) < 0.0) {
        return Err(Error::PoleNotBracketed { a, b });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn pv_core<N, D>(
    f_num: &N,
    f_den: &D,
    pole: f64,
    slope: f64,
    a: f64,
    b: f64,
    w: f64,
    cfg: &QuadConfig,
) -> Result<PVResult>
where
    N: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let local = f_den(pole - w).abs().max(f_den(pole + w).abs()) / w;
    if !(slope.abs() >= 1e-12 * local) || slope == 0.0 {
        return Err(Error::DegeneratePole { pole, slope });
    }
    let r = f_num(pole) / slope;
    let g = |x: f64| f_num(x) / f_den(x);
    // Subtract r/(x - pole) on the symmetric window; its integral there is zero.
    let folded = |t: f64| (g(pole + t) - r / t) + (g(pole - t) + r / t);
    // The folded integrand may cancel to pure rounding noise; |r| sets the
    // natural scale of a principal value.
    let inner_cfg = QuadConfig {
        abs_tol: cfg.abs_tol.max(cfg.rel_tol * r.abs()),
        ..*cfg
    };
    let inner = integrate_finite(folded, 0.0, w, &inner_cfg)?;
    let mut total = inner.value;
    let mut err = inner.error_estimate;
    let mut evals = 2 * inner.evaluations;
    for (lo, hi) in [(a, pole - w), (pole + w, b)] {
        if hi > lo {
            let q = integrate_finite(g, lo, hi, cfg)?;
            total += q.value;
            err += q.error_estimate;
            evals += q.evaluations;
        }
    }
    Ok(PVResult {
        principal_value: total,
        residue_coefficient: f_num(pole) / slope.abs(),
        error_estimate: err,
        evaluations: evals,
    })
}

/// Brent's bracketing root finder; `tol` bounds the final bracket width.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..500 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Brent's golden-section/parabolic minimizer on `[lo, hi]`.
pub fn minimize_scalar<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = f64::EPSILON.sqrt() * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(x);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(x)
}
