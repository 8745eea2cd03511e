//! Momentum kernels of the second iteration.
//!
//! Every kernel depends on its momentum argument only through the magnitude:
//! the defining sums run over all directions of the summed momenta, so a
//! rotation of the argument is absorbed by rotating the summation variables.
//! A vector argument `P - k` is therefore evaluated as `kernel_i(|P - k|)`.
//!
//! Values grow like `e^{2k^2/3λ^2}` and are returned as [`KernelValue`].

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scaled::Scaled;
use crate::specfun::{erf_scaled_product, erfi_scaled};

pub type KernelValue = Scaled;

/// Below this `k/λ` the closed forms are replaced by Taylor series.
pub const SERIES_SWITCH: f64 = 1e-3;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

// Taylor coefficients in x = k/λ of the dimensionless pieces
//   k·I1 = λ^2 a(x),  I2 = λ^2 b1(x) + λ b2(x),  I3 = λ c(x),
// listed for x^0, x^2, x^4, x^6.
const A: [f64; 4] = [
    0.0,
    -0.005_628_954_646_796_542_9,
    -0.001_501_054_572_479_078_1,
    -0.000_285_915_156_662_681_54,
];
const B1: [f64; 4] = [
    0.004_221_715_985_097_407_1,
    0.001_876_318_215_598_847_6,
    0.000_500_351_524_159_692_7,
    0.000_095_305_052_220_893_847,
];
const B2: [f64; 4] = [
    0.018_329_033_899_231_06,
    0.004_073_118_644_273_568_8,
    0.000_814_623_728_854_713_77,
    0.000_129_305_353_786_462_5,
];
const C: [f64; 4] = [
    -0.051_842_336_650_977_556,
    -0.005_760_259_627_886_395,
    -0.000_576_025_962_788_639_5,
    -0.000_045_716_346_253_066_628,
];

fn even_series(c: &[f64; 4], x: f64) -> f64 {
    let x2 = x * x;
    c[0] + x2 * (c[1] + x2 * (c[2] + x2 * c[3]))
}

fn even_series_derivative(c: &[f64; 4], x: f64) -> f64 {
    let x2 = x * x;
    x * (2.0 * c[1] + x2 * (4.0 * c[2] + x2 * 6.0 * c[3]))
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("kernel momentum must be positive and finite, got {k}"));
    }
    Ok(())
}

fn sqrt_2_3() -> f64 {
    (2.0f64 / 3.0).sqrt()
}

/// `e^{2x^2/3} erf(√(2/3) x)`.
fn growth_erf(x: f64) -> Scaled {
    erf_scaled_product(1.0, sqrt_2_3() * x)
}

/// `k · I1_k = (λ^2/32π^2)(4k - √(6π) λ e^{2k^2/3λ^2} erf(√(2/3) k/λ))/k`.
pub fn kernel_i1_dot_k(k: f64, lambda: f64) -> Result<KernelValue> {
    check_k(k)?;
    let x = k / lambda;
    let l2 = lambda * lambda;
    if x < SERIES_SWITCH {
        return Ok(Scaled::from(l2 * even_series(&A, x)));
    }
    let inner = Scaled::from(4.0 * x) - growth_erf(x) * (6.0 * PI).sqrt();
    Ok(inner * (l2 / (32.0 * PI * PI * x)))
}

/// `I2_k = (λ^2/96π^2)(√(6π) λ e^{2k^2/3λ^2} erf(√(2/3)k/λ) + 6π erfi(√(2/3)k/λ))/k`.
pub fn kernel_i2(k: f64, lambda: f64) -> Result<KernelValue> {
    check_k(k)?;
    Ok(i2_at(k / lambda, lambda))
}

fn i2_at(x: f64, lambda: f64) -> Scaled {
    if x < SERIES_SWITCH {
        return Scaled::from(lambda * lambda * even_series(&B1, x) + lambda * even_series(&B2, x));
    }
    let inner = growth_erf(x) * ((6.0 * PI).sqrt() * lambda) + erfi_scaled(sqrt_2_3() * x) * (6.0 * PI);
    inner * (lambda / (96.0 * PI * PI * x))
}

/// `I3_k = -(λ^2/4π) erfi(k/√3λ)/k`.
pub fn kernel_i3(k: f64, lambda: f64) -> Result<KernelValue> {
    check_k(k)?;
    Ok(i3_at(k / lambda, lambda))
}

fn i3_at(x: f64, lambda: f64) -> Scaled {
    if x < SERIES_SWITCH {
        return Scaled::from(lambda * even_series(&C, x));
    }
    erfi_scaled(x / 3f64.sqrt()) * (-lambda / (4.0 * PI * x))
}

/// The three pieces of `I_k` and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParts {
    pub i1_dot_k: KernelValue,
    pub i2: KernelValue,
    pub i3: KernelValue,
    pub total: KernelValue,
}

/// `I_k = k·I1_k + I2_k + I3_k` for `k ≥ 0`.
pub fn kernel_parts(k: f64, lambda: f64) -> Result<KernelParts> {
    if k == 0.0 {
        let i2 = Scaled::from(lambda * lambda * B1[0] + lambda * B2[0]);
        let i3 = Scaled::from(lambda * C[0]);
        return Ok(KernelParts {
            i1_dot_k: Scaled::ZERO,
            i2,
            i3,
            total: i2 + i3,
        });
    }
    let i1_dot_k = kernel_i1_dot_k(k, lambda)?;
    let i2 = kernel_i2(k, lambda)?;
    let i3 = kernel_i3(k, lambda)?;
    Ok(KernelParts {
        i1_dot_k,
        i2,
        i3,
        total: i1_dot_k + i2 + i3,
    })
}

/// `I_k`; at `k = 0` its limit `λ^2/24π^2 + λ(√(2π/3)/8π^2 - 1/(2√3 π^{3/2}))`.
pub fn kernel_i(k: f64, lambda: f64) -> Result<KernelValue> {
    if k == 0.0 {
        return kernel_parts(0.0, lambda).map(|p| p.total);
    }
    if !(k > 0.0) {
        return domain(format!("kernel momentum must be non-negative, got {k}"));
    }
    let x = k / lambda;
    if x < SERIES_SWITCH {
        let l2 = lambda * lambda;
        let v = l2 * (even_series(&A, x) + even_series(&B1, x)) + lambda * (even_series(&B2, x) + even_series(&C, x));
        return Ok(Scaled::from(v));
    }
    kernel_parts(k, lambda).map(|p| p.total)
}

/// Leading large-k form `-λ^3 √(6π)/(48π^2) e^{2k^2/3λ^2}/k`.
pub fn kernel_i_asymptotic(k: f64, lambda: f64) -> Result<KernelValue> {
    check_k(k)?;
    let x = k / lambda;
    let c = -lambda.powi(3) * (6.0 * PI).sqrt() / (48.0 * PI * PI * k);
    Ok(Scaled::new(c, 2.0 * x * x / 3.0))
}

/// Large-k forms of the three pieces:
/// `k·I1 ~ -(λ^2/32π^2)(√(6π) λ e^{2k^2/3λ^2} - 4k)/k`,
/// `I2 ~ (λ^3 √(6π)/96π^2) e^{2k^2/3λ^2}/k`,
/// `I3 ~ -√3 λ^3 e^{k^2/3λ^2}/(4π^{3/2} k^2)`.
pub fn kernel_parts_asymptotic(k: f64, lambda: f64) -> Result<KernelParts> {
    check_k(k)?;
    let x = k / lambda;
    let l3 = lambda.powi(3);
    let grow = Scaled::new(1.0, 2.0 * x * x / 3.0);
    let i1_dot_k = (grow * ((6.0 * PI).sqrt() * lambda) - Scaled::from(4.0 * k))
        * (-lambda * lambda / (32.0 * PI * PI * k));
    let i2 = grow * (l3 * (6.0 * PI).sqrt() / (96.0 * PI * PI * k));
    let i3 = Scaled::new(-3f64.sqrt() * l3 / (4.0 * PI.powf(1.5) * k * k), x * x / 3.0);
    Ok(KernelParts {
        i1_dot_k,
        i2,
        i3,
        total: kernel_i_asymptotic(k, lambda)?,
    })
}

/// Analytic `d I_k / dk`.
pub fn kernel_i_derivative(k: f64, lambda: f64) -> Result<KernelValue> {
    check_k(k)?;
    let x = k / lambda;
    if x < SERIES_SWITCH {
        let v = lambda * (even_series_derivative(&A, x) + even_series_derivative(&B1, x))
            + even_series_derivative(&B2, x)
            + even_series_derivative(&C, x);
        return Ok(Scaled::from(v));
    }
    let s6pi = (6.0 * PI).sqrt();
    let y = sqrt_2_3() * x;
    let e = growth_erf(x);
    // E'(x) = (4x/3) E + (2/√π) √(2/3)
    let e_prime = e * (4.0 * x / 3.0) + Scaled::from(FRAC_2_SQRT_PI * sqrt_2_3());

    let d1 = (e * (s6pi * (1.0 - 4.0 * x * x / 3.0)) - Scaled::from(4.0 * x))
        * (lambda / (32.0 * PI * PI * x * x));

    let h = (e * (s6pi * lambda) + erfi_scaled(y) * (6.0 * PI)) * (1.0 / x);
    let h_prime = (e_prime * (s6pi * lambda) + Scaled::new(6.0 * PI * FRAC_2_SQRT_PI * sqrt_2_3(), y * y)
        - h)
        * (1.0 / x);
    let d2 = h_prime * (1.0 / (96.0 * PI * PI));

    let z = x / 3f64.sqrt();
    let gi = erfi_scaled(z);
    let gi_prime = Scaled::new(FRAC_2_SQRT_PI / 3f64.sqrt(), z * z);
    let d3 = (gi_prime * x - gi) * (-1.0 / (4.0 * PI * x * x));

    Ok(d1 + d2 + d3)
}

/// Closed-form approximation of the double-sum kernel,
/// `J_k ≈ √5 λ^2/(4(2π)^3 3^5) e^{4k^2/5λ^2} ((2/15)k^2/λ^2 - 1)/(1 + (4/45)k^2/λ^2)^3`.
pub fn kernel_j(k: f64, lambda: f64) -> f64 {
    kernel_j_scaled(k, lambda).to_f64()
}

/// [`kernel_j`] without overflow past `k ≈ 30λ`.
pub fn kernel_j_scaled(k: f64, lambda: f64) -> KernelValue {
    let x2 = (k / lambda).powi(2);
    let c = 5f64.sqrt() * lambda * lambda / (4.0 * (2.0 * PI).powi(3) * 243.0);
    Scaled::new(c * (2.0 / 15.0 * x2 - 1.0) / (1.0 + 4.0 / 45.0 * x2).powi(3), 0.8 * x2)
}

/// `d J_k / dk` of [`kernel_j`].
pub fn kernel_j_derivative(k: f64, lambda: f64) -> f64 {
    let x = k / lambda;
    let x2 = x * x;
    let c = 5f64.sqrt() * lambda * lambda / (4.0 * (2.0 * PI).powi(3) * 243.0);
    let n = 2.0 / 15.0 * x2 - 1.0;
    let q = 1.0 + 4.0 / 45.0 * x2;
    let dx = c * (0.8 * x2).exp() * (1.6 * x * n / q.powi(3) + (4.0 * x / 15.0) / q.powi(3) - n * (8.0 * x / 15.0) / q.powi(4));
    dx / lambda
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Default seed of the Monte-Carlo oracle.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// Monte-Carlo value of the defining double integral of `J_k`,
/// `(1/8(2π)^6) ∫d^3l d^3m (l·m)/(l^3 m^3) e^{-(l^2+m^2)/2λ^2} e^{-(|l+m|^2 + 2(l+m)·k)/λ^2}`.
///
/// Radii are drawn from the half-normal `∝ e^{-a r^2}` with `a = 3/4` (in units
/// of λ), directions uniformly; the variance is finite for any `a < 1`.
pub fn kernel_j_oracle(k: f64, lambda: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    if !(k >= 0.0) {
        return domain(format!("momentum must be non-negative, got {k}"));
    }
    if samples < 2 {
        return domain("the oracle needs at least two samples");
    }
    const A_RAD: f64 = 0.75;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, (0.5 / A_RAD).sqrt()).expect("valid width");
    let density = |r: f64| 2.0 * (A_RAD / PI).sqrt() * (-A_RAD * r * r).exp();
    let kz = k / lambda;
    let norm = (4.0 * PI).powi(2) / (8.0 * (2.0 * PI).powi(6));
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let rl: f64 = normal.sample(&mut rng);
        let rm: f64 = normal.sample(&mut rng);
        let (rl, rm) = (rl.abs(), rm.abs());
        let ul: [f64; 3] = UnitSphere.sample(&mut rng);
        let um: [f64; 3] = UnitSphere.sample(&mut rng);
        let cos_g = ul[0] * um[0] + ul[1] * um[1] + ul[2] * um[2];
        let s = [rl * ul[0] + rm * um[0], rl * ul[1] + rm * um[1], rl * ul[2] + rm * um[2]];
        let s2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        let expo = -0.5 * (rl * rl + rm * rm) - s2 - 2.0 * s[2] * kz;
        let w = norm * cos_g * expo.exp() / (density(rl) * density(rm));
        let delta = w - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (w - mean);
    }
    let var = m2 / (samples - 1) as f64;
    let l2 = lambda * lambda;
    Ok(McEstimate {
        value: l2 * mean,
        std_error: l2 * (var / samples as f64).sqrt(),
        samples,
    })
}

/// Exact `J_0 = -λ^2 α / (2^8 π^4)` from the double-sum term of the energy.
pub fn kernel_j0_exact(lambda: f64) -> f64 {
    -lambda * lambda * crate::zeroth::alpha_constant() / (256.0 * PI.powi(4))
}
