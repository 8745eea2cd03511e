//! Variational (zeroth-order) energy, optimal width and effective mass.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::{find_root, integrate_finite, integrate_semi_infinite_scaled, minimize_scalar, QuadConfig};
use crate::specfun::erf;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerothResult {
    pub lambda_opt: f64,
    pub e0_weak: f64,
    pub e0_full: f64,
    pub mass0: f64,
}

fn sqrt_3pi() -> f64 {
    (3.0 * PI).sqrt()
}

/// `E^{(0)} / g^2` at weak coupling.
pub fn e0_weak_per_g2(lambda: f64) -> f64 {
    (lambda * (SQRT_2 - 4.0) * sqrt_3pi() + lambda * lambda) / (24.0 * PI * PI)
}

/// Weak-coupling ground-state energy `g^2/24π^2 (λ(√2-4)√(3π) + λ^2)`.
pub fn e0_weak(g: f64, lambda: f64) -> f64 {
    g * g * e0_weak_per_g2(lambda)
}

/// Integrand of the α constant; `-16u/9 + ...` near zero.
pub fn alpha_integrand(u: f64) -> f64 {
    if u < 0.02 {
        let u2 = u * u;
        return u
            * (-1.777_777_777_777_777_8
                + u2 * (2.192_592_592_592_592_6
                    + u2 * (-1.379_188_712_522_045_9 + u2 * (0.588_738_650_467_045_53 - u2 * 0.191_475_553_101_067_5))));
    }
    let a = 4.0 * u * (-1.5 * u * u).exp();
    let b = (6.0 * PI).sqrt() * erf((2.0f64 / 3.0).sqrt() * u) * (-5.0 * u * u / 6.0).exp();
    (a - b) / (u * u)
}

/// `α = -∫_0^∞ du u^{-2} (4u - e^{2u^2/3} √(6π) erf(√(2/3) u)) e^{-3u^2/2}`.
pub fn compute_alpha(cfg: &QuadConfig) -> Result<f64> {
    let q = integrate_semi_infinite_scaled(alpha_integrand, 0.0, 1.0, cfg)?;
    Ok(-q.value)
}

/// α at relative tolerance 1e-12, computed once.
pub fn alpha_constant() -> f64 {
    static ALPHA: OnceLock<f64> = OnceLock::new();
    *ALPHA.get_or_init(|| {
        compute_alpha(&QuadConfig::with_rel_tol(1e-12)).expect("alpha quadrature converges")
    })
}

/// Energy including the `g^4` double-sum term, `e0_weak - g^4 λ^2 α / 2^8 π^4`.
pub fn e0_full(g: f64, lambda: f64) -> f64 {
    let g2 = g * g;
    e0_weak(g, lambda) - g2 * g2 * lambda * lambda * alpha_constant() / (256.0 * PI.powi(4))
}

/// Weak-coupling optimum `√(3π)(4-√2)/2`.
pub fn lambda_opt_weak() -> f64 {
    sqrt_3pi() * (4.0 - SQRT_2) / 2.0
}

/// Stationary point of `e0_full` solved exactly; the quadratic-in-λ structure
/// makes it `λ_0 / (1 - 3αg^2/32π^2)`.
pub fn lambda_opt_closed_form(g: f64) -> f64 {
    lambda_opt_weak() / (1.0 - 3.0 * alpha_constant() * g * g / (32.0 * PI * PI))
}

/// Minimizer of `e0_full(g, ·)` found numerically on (0.5, 20).
pub fn lambda_opt(g: f64) -> Result<f64> {
    if !(g >= 0.0) {
        return domain(format!("coupling must be non-negative, got {g}"));
    }
    if g > 10.0 {
        return domain(format!("coupling {g} exceeds 10; the width minimum leaves its bracket"));
    }
    let alpha = alpha_constant();
    let g2 = g * g;
    let c4 = g2 * alpha / (256.0 * PI.powi(4));
    let per_g2 = |l: f64| e0_weak_per_g2(l) - c4 * l * l;
    let slope = |l: f64| ((SQRT_2 - 4.0) * sqrt_3pi() + 2.0 * l) / (24.0 * PI * PI) - 2.0 * c4 * l;
    let rough = minimize_scalar(per_g2, 0.5, 20.0, 1e-10)?;
    let h = 1e-4 * rough;
    Ok(find_root(slope, rough - h, rough + h, 4.0 * f64::EPSILON * rough).unwrap_or(rough))
}

/// Weak-coupling energy at total momentum `P`, without the free `P^2/2`.
/// Each of the three Gaussian sums is a nested (radial, cos θ) quadrature.
pub fn e0_weak_moving(p: f64, g: f64, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(p >= 0.0) {
        return domain(format!("momentum must be non-negative, got {p}"));
    }
    let l2 = lambda * lambda;
    // Inner integrals feed the outer one; keep their noise well below its tolerance.
    let inner_cfg = QuadConfig {
        rel_tol: (cfg.rel_tol * 1e-3).max(1e-13),
        ..*cfg
    };
    let angular = |m: f64, moment: bool, a: f64, b: f64| -> Result<f64> {
        // ∫_{-1}^{1} dμ μ^n e^{-a m^2 + b m μ}
        let f = |mu: f64| {
            let w = (-a * m * m + b * m * mu).exp();
            if moment {
                mu * w
            } else {
                w
            }
        };
        // The μ-moment cancels for small b·m; measure its error against ∫|integrand|.
        let local = QuadConfig {
            abs_tol: inner_cfg.rel_tol * 2.0 * (-a * m * m + b.abs() * m).exp(),
            ..inner_cfg
        };
        Ok(integrate_finite(f, -1.0, 1.0, &local)?.value)
    };
    let radial = |h: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let failure = RefCell::new(None);
        let f = |m: f64| {
            h(m).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                0.0
            })
        };
        let q = integrate_semi_infinite_scaled(f, 0.0, lambda, cfg);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(q?.value)
    };
    let a2 = 1.5 / l2;
    let b2 = 2.0 * p / l2;
    let t1 = if p == 0.0 {
        0.0
    } else {
        -p * radial(&|m| angular(m, true, a2, b2))?
    };
    let t2 = radial(&|m| Ok((0.5 * m + 1.0) * angular(m, false, a2, b2)?))?;
    let t3 = radial(&|m| angular(m, false, 0.75 / l2, p / l2))?;
    let g2 = g * g;
    Ok(g2 / (8.0 * PI * PI) * (t1 + t2) - g2 / (4.0 * PI * PI) * t3)
}

/// Coefficient `(17 - √2)/(189 π^2)` of the zeroth-order mass.
pub fn mass0_coefficient() -> f64 {
    (17.0 - SQRT_2) / (189.0 * PI * PI)
}

/// Zeroth-order effective mass `1 + g^2 (17-√2)/(189π^2)`.
pub fn mass0(g: f64) -> f64 {
    1.0 + g * g * mass0_coefficient()
}

/// λ*, both energies and the mass; `lambda` overrides the minimization.
pub fn zeroth(g: f64, lambda: Option<f64>) -> Result<ZerothResult> {
    let l = match lambda {
        Some(l) if l > 0.0 && l.is_finite() => l,
        Some(l) => return domain(format!("width must be positive, got {l}")),
        None => lambda_opt(g)?,
    };
    Ok(ZerothResult {
        lambda_opt: l,
        e0_weak: e0_weak(g, l),
        e0_full: e0_full(g, l),
        mass0: mass0(g),
    })
}
