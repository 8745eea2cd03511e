//! Self-consistent cutoff, second-iteration complex energy, transition rate
//! and second-iteration mass.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::{kernel_i, kernel_i_derivative, kernel_j, kernel_j_derivative, kernel_j_scaled, SERIES_SWITCH};
use crate::model::{pt_binding_energy, ModelParams};
use crate::quad::{
    find_root, integrate_finite, integrate_principal_value_window, integrate_semi_infinite_scaled, QuadConfig,
};
use crate::scaled::Scaled;
use crate::specfun::erf;
use crate::zeroth::{e0_weak, lambda_opt, mass0};

/// Upper end of the root scan, in units of λ.
const SCAN_LIMIT: f64 = 40.0;
const SCAN_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexEnergy {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexEnergy {
    fn from(z: Complex64) -> Self {
        ComplexEnergy { re: z.re, im: z.im }
    }
}

impl From<ComplexEnergy> for Complex64 {
    fn from(z: ComplexEnergy) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    pub k0: f64,
    /// `λ √(3 |ln g|)`.
    pub k0_asymptotic: f64,
    /// `k0^2/2 + k0 + g^2 I_{k0} - E0` at the returned root.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondOptions {
    pub quad: QuadConfig,
    /// Keep the `g^4 J_k` term in the denominator and numerators.
    pub include_j: bool,
    /// Multiplies the default split point between the pole region and the tail.
    pub split_scale: f64,
}

impl Default for SecondOptions {
    fn default() -> Self {
        SecondOptions {
            quad: QuadConfig::default(),
            include_j: false,
            split_scale: 1.0,
        }
    }
}

impl SecondOptions {
    pub fn with_quad(quad: QuadConfig) -> Self {
        SecondOptions {
            quad,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondIteration {
    pub a: ComplexEnergy,
    pub b: ComplexEnergy,
    pub e2: ComplexEnergy,
    /// Zeros of the denominator that were integrated across.
    pub poles: Vec<f64>,
    /// Boundary between the pole region and the semi-infinite tail.
    pub split: f64,
    /// The zeroth-order energy used inside the denominators.
    pub e0: f64,
}

impl SecondIteration {
    pub fn no_pole(&self) -> bool {
        self.poles.is_empty()
    }
}

/// Imaginary part contributed by a simple zero of the denominator under the
/// `D - i0` prescription: `+π · num(p)/|D'(p)|`. With the numerators of this
/// problem negative at the pole, the energy acquires `Im < 0` (decay).
pub fn pole_prescription(residue_coefficient: f64) -> f64 {
    PI * residue_coefficient
}

/// Denominator and numerators of the second iteration at fixed (g, λ).
struct Resolvent {
    g2: f64,
    lambda: f64,
    e0: f64,
    include_j: bool,
    j0: f64,
}

struct Terms {
    /// `k^2/2 + k + g^2 I_k (+ g^4 J_k) - E0`.
    den: Scaled,
    /// `(g^2/4π^2) k^2 Ñ1 Ñ2 / φ̂^2`.
    num_a: Scaled,
    /// `(g^2/4π^2) k^2 Ñ1 v (φ̂^2 - 1) / φ̂^2`.
    num_b: Scaled,
    /// `Ñ2`.
    n2: Scaled,
}

impl Resolvent {
    fn new(g: f64, lambda: f64, include_j: bool) -> Self {
        let g2 = g * g;
        let j0 = if include_j { g2 * g2 * kernel_j(0.0, lambda) } else { 0.0 };
        Resolvent {
            g2,
            lambda,
            // Retaining J shifts the reference energy by g^4 J_0 so that the
            // denominator still vanishes at k = 0, as the exact double-sum term
            // does for the full zeroth-order energy.
            e0: e0_weak(g, lambda) + j0,
            include_j,
            j0,
        }
    }

    fn j_term(&self, k: f64) -> Scaled {
        if self.include_j {
            kernel_j_scaled(k, self.lambda) * (self.g2 * self.g2)
        } else {
            Scaled::ZERO
        }
    }

    /// `g^2 I_k + g^4 J_k - E0`, free of cancellation near k = 0.
    fn shift(&self, k: f64) -> Result<Scaled> {
        let x = k / self.lambda;
        if x < SERIES_SWITCH {
            // Below the switch I_k - I_0 is taken from its series; g^2 I_0 = e0_weak exactly.
            let i0 = kernel_i(0.0, self.lambda)?.to_f64();
            let di = kernel_i(k, self.lambda)?.to_f64() - i0;
            let dj = self.j_term(k).to_f64() - self.j0;
            return Ok(Scaled::from(self.g2 * di + dj));
        }
        Ok(kernel_i(k, self.lambda)? * self.g2 + self.j_term(k) - Scaled::from(self.e0))
    }

    fn den(&self, k: f64) -> Result<Scaled> {
        Ok(Scaled::from(0.5 * k * k + k) + self.shift(k)?)
    }

    /// `D(k)` divided by the sum of its term magnitudes; bounded by 1.
    fn den_ratio(&self, k: f64) -> Result<f64> {
        let i = kernel_i(k, self.lambda)? * self.g2;
        let scale = Scaled::from(0.5 * k * k + k + self.e0.abs()) + i.abs() + self.j_term(k).abs();
        Ok(self.den(k)?.ratio(&scale))
    }

    /// `D'(k)` divided by [`Resolvent::damping`].
    fn den_slope_damped(&self, k: f64) -> Result<f64> {
        let mut s = Scaled::from(k + 1.0) + kernel_i_derivative(k, self.lambda)? * self.g2;
        if self.include_j {
            // J' = J · (dJ/J) keeps the growth factor out of f64.
            let x2 = (k / self.lambda).powi(2);
            let grow = Scaled::new(1.0, 0.8 * x2);
            let reduced = kernel_j_derivative(k, self.lambda) * (-0.8 * x2).exp();
            s = s + grow * (self.g2 * self.g2 * reduced);
        }
        Ok((s * self.damping(k).recip()).to_f64())
    }

    /// Smooth positive factor `e^{2k^2/3λ^2}` that keeps the pole-region
    /// numerators and denominator inside f64; dividing both by it changes
    /// neither the principal value nor the residue.
    fn damping(&self, k: f64) -> Scaled {
        let x = k / self.lambda;
        Scaled::new(1.0, 2.0 * x * x / 3.0)
    }

    fn terms(&self, k: f64) -> Result<Terms> {
        let x = k / self.lambda;
        let x2 = x * x;
        let kp = 0.5 * k * k + k;
        // v φ̂^2 (k^2/2 + k) + φ̂/√k = (φ̂/√k)(1 - e^{-3x^2/4}(1 + k/2))
        let e34 = (-0.75 * x2).exp();
        let bracket = -(-0.75 * x2).exp_m1() - 0.5 * k * e34;
        let s = Scaled::new(bracket / k.sqrt(), -0.5 * x2);
        let shift = self.shift(k)?;
        let v_phi2 = Scaled::new(-k.powf(-1.5), -1.25 * x2);
        let t = v_phi2 * shift;
        let n1 = -(s + t);
        let v = Scaled::new(-k.powf(-1.5), -0.25 * x2);
        // v φ̂^2 G - E0 v = v φ̂^2 (G - E0) + E0 v (φ̂^2 - 1)
        let phi2_minus_one = (-x2).exp_m1();
        let n2 = (s + t) + v * (self.e0 * phi2_minus_one);
        let pref = Scaled::new(self.g2 / (4.0 * PI * PI) * k * k, x2);
        let den = Scaled::from(kp) + shift;
        Ok(Terms {
            den,
            num_a: pref * n1 * n2,
            num_b: pref * n1 * v * phi2_minus_one,
            n2,
        })
    }

    /// Sign changes of D on (0, 40λ], each refined to a root.
    fn poles(&self) -> Result<Vec<f64>> {
        let mut roots = Vec::new();
        let step = SCAN_STEP * self.lambda;
        let n = (SCAN_LIMIT / SCAN_STEP).round() as usize;
        let mut k_prev = step;
        let mut r_prev = self.den_ratio(k_prev)?;
        for i in 2..=n {
            let k = i as f64 * step;
            let r = self.den_ratio(k)?;
            if r_prev * r < 0.0 {
                let f = |k: f64| self.den_ratio(k).unwrap_or(f64::NAN);
                roots.push(find_root(f, k_prev, k, 4.0 * f64::EPSILON * k)?);
            }
            k_prev = k;
            r_prev = r;
        }
        Ok(roots)
    }
}

fn check_coupling(g: f64, lambda: f64) -> Result<()> {
    if !(g > 0.0 && g < 1.0) {
        return domain(format!("coupling must lie in (0, 1), got {g}"));
    }
    ModelParams::new(g, lambda).map(|_| ())
}

/// First root of `k^2/2 + k + g^2 I_k - E0 = 0` with `E0 = e0_weak(g, λ)`.
pub fn cutoff_k0(g: f64, lambda: f64) -> Result<CutoffResult> {
    check_coupling(g, lambda)?;
    let res = Resolvent::new(g, lambda, false);
    let roots = res.poles()?;
    let k0 = *roots.first().ok_or(Error::NoSignChange {
        lo: SCAN_STEP * lambda,
        hi: SCAN_LIMIT * lambda,
    })?;
    Ok(CutoffResult {
        k0,
        k0_asymptotic: cutoff_asymptotic(g, lambda),
        residual: res.den(k0)?.to_f64(),
    })
}

/// `λ √(3 |ln g|)`.
pub fn cutoff_asymptotic(g: f64, lambda: f64) -> f64 {
    lambda * (3.0 * g.ln().abs()).sqrt()
}

/// The two second-iteration integrands `(A, B)` at momentum `k`.
pub fn second_iteration_integrands(g: f64, lambda: f64, k: f64, include_j: bool) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return domain(format!("integrand needs k > 0, got {k}"));
    }
    let t = Resolvent::new(g, lambda, include_j).terms(k)?;
    Ok(((t.num_a / t.den).to_f64(), (t.num_b / t.den).to_f64()))
}

/// `E^{(2)} = A/B` by quadrature, principal value and the `D - i0` residue.
pub fn e2_exact(g: f64, lambda: f64, opts: &SecondOptions) -> Result<SecondIteration> {
    check_coupling(g, lambda)?;
    let res = Resolvent::new(g, lambda, opts.include_j);
    let cfg = &opts.quad;
    let poles = res.poles()?;
    let last = poles.last().copied().unwrap_or(0.0);
    let split = opts.split_scale * (6.0 * lambda).max(last + 2.0 * lambda);
    if split <= last {
        return domain(format!("split point {split} must lie beyond the last pole {last}"));
    }

    let failure = std::cell::RefCell::new(None);
    let guard = |r: Result<f64>| {
        r.unwrap_or_else(|e| {
            failure.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let num_a = |k: f64| guard(res.terms(k).map(|t| (t.num_a * res.damping(k).recip()).to_f64()));
    let num_b = |k: f64| guard(res.terms(k).map(|t| (t.num_b * res.damping(k).recip()).to_f64()));
    let den = |k: f64| guard(res.den(k).map(|d| (d * res.damping(k).recip()).to_f64()));
    let whole_a = |k: f64| guard(res.terms(k).map(|t| (t.num_a / t.den).to_f64()));
    let whole_b = |k: f64| guard(res.terms(k).map(|t| (t.num_b / t.den).to_f64()));

    let mut a = Complex64::new(res.e0, 0.0);
    let mut b = Complex64::new(1.0, 0.0);

    // Segment edges: a regular head near k = 0, one pole per segment, then the tail.
    let mut edges = Vec::with_capacity(poles.len() + 2);
    let head = poles.first().map(|p| 0.1 * p).unwrap_or(split);
    edges.push(head);
    for w in poles.windows(2) {
        edges.push(0.5 * (w[0] + w[1]));
    }
    if !poles.is_empty() {
        edges.push(split);
    }

    a.re += integrate_finite(whole_a, 0.0, head, cfg)?.value;
    b.re += integrate_finite(whole_b, 0.0, head, cfg)?.value;
    for (i, &p) in poles.iter().enumerate() {
        let (lo, hi) = (edges[i], edges[i + 1]);
        let slope = res.den_slope_damped(p)?;
        let half = 0.5 * (p - lo).min(hi - p);
        let pa = integrate_principal_value_window(num_a, den, p, slope, lo, hi, half, cfg)?;
        let pb = integrate_principal_value_window(num_b, den, p, slope, lo, hi, half, cfg)?;
        a += Complex64::new(pa.principal_value, pole_prescription(pa.residue_coefficient));
        b += Complex64::new(pb.principal_value, pole_prescription(pb.residue_coefficient));
    }
    a.re += integrate_semi_infinite_scaled(whole_a, split, lambda, cfg)?.value;
    b.re += integrate_semi_infinite_scaled(whole_b, split, lambda, cfg)?.value;

    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(SecondIteration {
        a: a.into(),
        b: b.into(),
        e2: (a / b).into(),
        poles,
        split,
        e0: res.e0,
    })
}

/// Square bracket of the closed-form `A`; tends to `e0_weak` as `k0 → ∞`.
pub fn analytic_bracket(g: f64, lambda: f64, k0: f64) -> f64 {
    let g2 = g * g;
    let x = k0 / lambda;
    g2 * lambda / (24.0 * PI * PI)
        * ((6.0 * PI).sqrt() * erf(1.5f64.sqrt() * x) + lambda - lambda * (-1.5 * x * x).exp())
        - g2 * lambda / (2.0 * 3f64.sqrt() * PI.powf(1.5)) * erf(3f64.sqrt() * x / 2.0)
}

/// `f(x) = (1/4π^2) ∫_0^x t/(1 + t/2) e^{-3t^2/4} dt`.
pub fn analytic_f(x: f64, cfg: &QuadConfig) -> Result<f64> {
    let h = |t: f64| t / (1.0 + 0.5 * t) * (-0.75 * t * t).exp();
    let q = if x.is_infinite() {
        integrate_semi_infinite_scaled(h, 0.0, 1.0, cfg)?
    } else {
        integrate_finite(h, 0.0, x, cfg)?
    };
    Ok(q.value / (4.0 * PI * PI))
}

/// Closed-form `(A, B)` of the approximate second iteration at cutoff `k0`.
pub fn e2_analytic_parts(g: f64, lambda: f64, k0: f64, cfg: &QuadConfig) -> Result<(f64, f64)> {
    if !(k0 > 0.0) {
        return domain(format!("cutoff must be positive, got {k0}"));
    }
    let g2 = g * g;
    let e0 = e0_weak(g, lambda);
    let x = k0 / lambda;
    let tail = (-5.0 * x * x / 12.0).exp();
    let s6pi = (6.0 * PI).sqrt();
    let a = e0 - analytic_bracket(g, lambda, k0) - g2 / (2.0 * PI * PI) * (0.5 * k0).ln_1p()
        + e0 * 12.0 * s6pi / (5.0 * lambda * PI) * tail;
    let b = 1.0 + g2 / (12.0 * PI * PI) * (1.0 - (-1.5 * x * x).exp()) - g2 * analytic_f(x, cfg)?
        - 144.0 * s6pi / (25.0 * lambda * PI) * (1.0 + 5.0 * x * x / 12.0) * tail;
    Ok((a, b))
}

/// Closed-form `A/B`.
pub fn e2_analytic(g: f64, lambda: f64, k0: f64, cfg: &QuadConfig) -> Result<f64> {
    let (a, b) = e2_analytic_parts(g, lambda, k0, cfg)?;
    Ok(a / b)
}

/// Singular small-g limit `-g^2/(2π^2) ln(k0/2 + 1)` at the exact cutoff.
pub fn e2_singular(g: f64, lambda: f64) -> Result<f64> {
    let c = cutoff_k0(g, lambda)?;
    Ok(pt_binding_energy(c.k0, g))
}

/// Half the one-phonon emission rate from the golden rule on the shell
/// `D(k0) = 0`: `(g^2/4π) k0^2/|k0 + 1 + g^2 I'_{k0}| · Ñ2(k0)^2/φ̂_{k0}^2`.
pub fn transition_half_rate(g: f64, lambda: f64) -> Result<f64> {
    let c = cutoff_k0(g, lambda)?;
    transition_half_rate_at(g, lambda, c.k0)
}

fn transition_half_rate_at(g: f64, lambda: f64, k0: f64) -> Result<f64> {
    let res = Resolvent::new(g, lambda, false);
    let t = res.terms(k0)?;
    let x = k0 / lambda;
    let n2_over_phi = t.n2.mul_exp(0.5 * x * x).to_f64();
    let slope = k0 + 1.0 + (kernel_i_derivative(k0, lambda)? * (g * g)).to_f64();
    Ok(g * g / (4.0 * PI) * k0 * k0 / slope.abs() * n2_over_phi * n2_over_phi)
}

/// Normalized cutoff integral `(1/6π^2) ∫_0^{k0} dk/(1 + k/2)^3 = (1/6π^2)(1 - (1 + k0/2)^{-2})`
/// of the moving-particle energy.
pub fn mass2_coefficient(k0: f64) -> f64 {
    let u = 1.0 + 0.5 * k0;
    (1.0 - 1.0 / (u * u)) / (6.0 * PI * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mass2 {
    pub coefficient: f64,
    /// `1/(1 - g^2 c)`.
    pub mass: f64,
    /// `1 + g^2 c`.
    pub mass_first_order: f64,
}

pub fn mass2_at(g: f64, k0: f64) -> Mass2 {
    let c = mass2_coefficient(k0);
    let g2 = g * g;
    Mass2 {
        coefficient: c,
        mass: 1.0 / (1.0 - g2 * c),
        mass_first_order: 1.0 + g2 * c,
    }
}

/// Second-iteration mass with the cutoff of (g, λ).
pub fn mass2(g: f64, lambda: f64) -> Result<Mass2> {
    if g == 0.0 {
        return Ok(mass2_at(0.0, f64::INFINITY));
    }
    let c = cutoff_k0(g, lambda)?;
    Ok(mass2_at(g, c.k0))
}

/// `E^{(2)}(P) = E^{(2)}(0) + (P^2/2)(1 - g^2 c(k0))` for small P.
pub fn e2_moving(p: f64, e2_rest: f64, g: f64, k0: f64) -> f64 {
    e2_rest + 0.5 * p * p * (1.0 - g * g * mass2_coefficient(k0))
}

/// All second-iteration quantities for one coupling at λ = lambda_opt(g).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub params: ModelParams,
    pub e0: f64,
    pub k0: CutoffResult,
    pub a: ComplexEnergy,
    pub b: ComplexEnergy,
    pub e2: ComplexEnergy,
    pub e2_analytic: f64,
    pub e2_singular: f64,
    pub transition_half_rate: f64,
    pub mass0: f64,
    pub mass2: f64,
}

pub fn iterate(g: f64, opts: &SecondOptions) -> Result<IterationResult> {
    let lambda = lambda_opt(g)?;
    iterate_at(g, lambda, opts)
}

pub fn iterate_at(g: f64, lambda: f64, opts: &SecondOptions) -> Result<IterationResult> {
    let params = ModelParams::new(g, lambda)?;
    let cut = cutoff_k0(g, lambda)?;
    let second = e2_exact(g, lambda, opts)?;
    Ok(IterationResult {
        params,
        e0: e0_weak(g, lambda),
        k0: cut,
        a: second.a,
        b: second.b,
        e2: second.e2,
        e2_analytic: e2_analytic(g, lambda, cut.k0, &opts.quad)?,
        e2_singular: pt_binding_energy(cut.k0, g),
        transition_half_rate: transition_half_rate_at(g, lambda, cut.k0)?,
        mass0: mass0(g),
        mass2: mass2_at(g, cut.k0).mass,
    })
}
