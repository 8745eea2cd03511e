//! Physical parameters, the Gaussian trial state and the weak-coupling
//! perturbation baseline. Units: m = ħ = c = 1, ω_k = k.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::{integrate_finite, integrate_semi_infinite, QuadConfig};

/// Coupling `g` and localization width `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(g: f64, lambda: f64) -> Result<Self> {
        if !(g >= 0.0 && g.is_finite()) {
            return domain(format!("coupling must be finite and non-negative, got {g}"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("width must be finite and positive, got {lambda}"));
        }
        Ok(ModelParams { g, lambda })
    }
}

/// Reduced field displacement `v_k = -e^{-k^2/4λ^2} / k^{3/2}`.
pub fn u_reduced(k: f64, lambda: f64) -> Result<f64> {
    if !(k > 0.0) {
        return domain(format!("field amplitude needs k > 0, got {k}"));
    }
    Ok(-(-k * k / (4.0 * lambda * lambda)).exp() / k.powf(1.5))
}

/// `φ_q / φ_0 = e^{-q^2/2λ^2}`.
pub fn phi_ratio(q: f64, lambda: f64) -> f64 {
    (-q * q / (2.0 * lambda * lambda)).exp()
}

/// `(sin y / y - 1) / y^2`, with its series near zero.
fn sinc_minus_one_over_y2(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        -1.0 / 6.0 + y2 * (1.0 / 120.0 + y2 * (-1.0 / 5040.0 + y2 * (1.0 / 362_880.0 - y2 / 39_916_800.0)))
    } else {
        (y.sin() / y - 1.0) / (y * y)
    }
}

/// Position-space self-interaction `Φ(R) = (g^2/4π^2) ∫ dt e^{-t^2/2}/t (sinc(λRt) - 1)`.
pub fn phi_big(r: f64, params: &ModelParams, cfg: &QuadConfig) -> Result<f64> {
    if !(r >= 0.0) {
        return domain(format!("distance must be non-negative, got {r}"));
    }
    if r == 0.0 || params.g == 0.0 {
        return Ok(0.0);
    }
    let s = params.lambda * r;
    let f = |t: f64| {
        let y = s * t;
        (-0.5 * t * t).exp() * t * s * s * sinc_minus_one_over_y2(y)
    };
    let q = integrate_semi_infinite(f, 0.0, cfg)?;
    Ok(params.g * params.g / (4.0 * PI * PI) * q.value)
}

/// Binding energy of perturbation theory with a sharp cutoff,
/// `-g^2/(2π^2) ln(K/2 + 1)`.
pub fn pt_binding_energy(cutoff: f64, g: f64) -> f64 {
    -g * g / (2.0 * PI * PI) * (0.5 * cutoff).ln_1p()
}

/// Second-order self-energy `Σ(P)` with `|k| ≤ K`, angular integral done in
/// closed form.
pub fn pt_self_energy(p: f64, cutoff: f64, g: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(p >= 0.0) {
        return domain(format!("momentum must be non-negative, got {p}"));
    }
    if p >= 1.0 {
        return domain(format!(
            "momentum {p} is at or above the emission threshold; the denominator vanishes"
        ));
    }
    if !(cutoff >= 0.0) {
        return domain(format!("cutoff must be non-negative, got {cutoff}"));
    }
    if cutoff == 0.0 {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(pt_binding_energy(cutoff, g));
    }
    let f = |k: f64| (2.0 * p / (0.5 * k + 1.0 - p)).ln_1p();
    let q = integrate_finite(f, 0.0, cutoff, cfg)?;
    Ok(-g * g / (8.0 * PI * PI * p) * q.value)
}

/// Perturbative effective mass `1 + g^2/6π^2`.
pub fn pt_mass(g: f64) -> f64 {
    1.0 + g * g / (6.0 * PI * PI)
}
