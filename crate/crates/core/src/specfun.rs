//! Error function, Dawson's integral and the scaled products built from them.

use crate::scaled::Scaled;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Dawson's integral `D(x) = e^{-x^2} ∫_0^x e^{t^2} dt`.
pub fn dawson(x: f64) -> f64 {
    if x < 0.0 {
        return -dawson(-x);
    }
    if x < 0.5 {
        dawson_series(x)
    } else if x < 50.0 {
        dawson_rybicki(x)
    } else {
        dawson_asymptotic(x)
    }
}

/// Maclaurin series `Σ (-2)^n x^{2n+1} / (2n+1)!!`.
fn dawson_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Rybicki's sampling sum `(1/√π) Σ_{n odd} e^{-(x-nh)^2}/n`; the
/// discretization error is of order `e^{-(π/2h)^2}`.
fn dawson_rybicki(x: f64) -> f64 {
    const H: f64 = 0.25;
    const HALF_WIDTH: i64 = 31;
    let n0 = 2 * (x / (2.0 * H)).round() as i64;
    let mut sum = 0.0;
    for j in (-HALF_WIDTH..=HALF_WIDTH).step_by(2) {
        let n = n0 + j;
        let d = x - n as f64 * H;
        sum += (-d * d).exp() / n as f64;
    }
    sum * FRAC_1_SQRT_PI
}

/// `D(x) ~ (1/2x) Σ (2n-1)!! / (2x^2)^n`.
fn dawson_asymptotic(x: f64) -> f64 {
    let y = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..12 {
        term *= (2 * n - 1) as f64 * y;
        sum += term;
    }
    sum / (2.0 * x)
}

/// Imaginary error function for moderate arguments; overflows past x ≈ 26.
pub fn erfi(x: f64) -> f64 {
    2.0 * FRAC_1_SQRT_PI * (x * x).exp() * dawson(x)
}

/// `erfi(x)` as a scaled value, exact in range for any finite x.
pub fn erfi_scaled(x: f64) -> Scaled {
    Scaled::new(2.0 * FRAC_1_SQRT_PI * dawson(x), x * x)
}

/// `e^{a x^2} erf(x)` as a scaled value.
pub fn erf_scaled_product(a: f64, x: f64) -> Scaled {
    Scaled::new(erf(x), a * x * x)
}
