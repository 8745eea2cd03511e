mod common;

use std::f64::consts::PI;

use common::{rel, simpson};
use proptest::prelude::*;
use uvreg::model::*;
use uvreg::{Error, QuadConfig};

#[test]
fn field_amplitude_examples() {
    assert!((u_reduced(1.0, 1e12).unwrap() + 1.0).abs() < 1e-15);
    assert!(rel(u_reduced(2.0, 1.0).unwrap(), -(-1f64).exp() / 2f64.powf(1.5)) < 1e-15);
    assert!((u_reduced(1.0, 2.0).unwrap() + 0.939_413_062_813_475_8).abs() < 1e-15);
    assert!(matches!(u_reduced(0.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(u_reduced(-1.0, 1.0), Err(Error::Domain(_))));
    assert!(u_reduced(50.0, 1.0).unwrap().abs() < 1e-200);
}

#[test]
fn wavefunction_ratio_examples() {
    assert_eq!(phi_ratio(0.0, 3.0), 1.0);
    assert!(rel(phi_ratio(2f64.sqrt() * 1.7, 1.7), (-1f64).exp()) < 1e-15);
    assert!(rel(phi_ratio(3.0, 2.0), (-9.0f64 / 8.0).exp()) < 1e-15);
}

#[test]
fn density_fourier_transform_is_the_field_profile() {
    // |φ(r)|^2 ∝ e^{-λ^2 r^2}; ∫ d^3r |φ|^2 e^{-ik·r} / ∫ d^3r |φ|^2 = e^{-k^2/4λ^2}
    let lambda: f64 = 1.3;
    let norm = simpson(|r| r * r * (-lambda * lambda * r * r).exp(), 0.0, 12.0 / lambda, 20_000);
    for x in [0.1, 1.0, 5.0] {
        let k = x * lambda;
        let ft = simpson(
            |r| {
                let s = if r == 0.0 { 1.0 } else { (k * r).sin() / (k * r) };
                r * r * (-lambda * lambda * r * r).exp() * s
            },
            0.0,
            12.0 / lambda,
            20_000,
        );
        let expected = (-k * k / (4.0 * lambda * lambda)).exp();
        assert!((ft / norm - expected).abs() < 1e-10, "x = {x}");
        // v_k carries exactly this profile
        assert!(rel(-u_reduced(k, lambda).unwrap() * k.powf(1.5), expected) < 1e-14);
    }
}

#[test]
fn self_interaction_examples() {
    let cfg = QuadConfig::default();
    let p = ModelParams::new(0.7, 2.0).unwrap();
    assert_eq!(phi_big(0.0, &p, &cfg).unwrap(), 0.0);
    // λR = 1: direct Simpson with the sinc written out
    let r = 0.5;
    let v = phi_big(r, &p, &cfg).unwrap();
    let oracle = simpson(
        |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                (-0.5 * t * t).exp() / t * (t.sin() / t - 1.0)
            }
        },
        0.0,
        40.0,
        400_000,
    ) * 0.49
        / (4.0 * PI * PI);
    assert!(v < 0.0);
    assert!(rel(v, oracle) < 1e-9, "{v} vs {oracle}");
    let p2 = ModelParams::new(1.4, 2.0).unwrap();
    assert!(rel(phi_big(r, &p2, &cfg).unwrap(), 4.0 * v) < 1e-14);
}

#[test]
fn perturbative_self_energy_examples() {
    let cfg = QuadConfig::default();
    for (k, g) in [(5.0, 0.3), (40.0, 1.0)] {
        assert!(rel(pt_self_energy(0.0, k, g, &cfg).unwrap(), -g * g / (2.0 * PI * PI) * (k / 2.0 + 1.0).ln()) < 1e-14);
    }
    assert_eq!(pt_self_energy(0.3, 0.0, 1.0, &cfg).unwrap(), 0.0);
    assert!((pt_self_energy(0.0, 2.0, 1.0, &cfg).unwrap() + 2f64.ln() / (2.0 * PI * PI)).abs() < 1e-15);
    assert!((pt_self_energy(0.0, 2.0, 1.0, &cfg).unwrap() + 0.035_115_246).abs() < 1e-9);
    assert!(matches!(pt_self_energy(1.0, 1.0, 1.0, &cfg), Err(Error::Domain(_))));
    assert!(matches!(pt_self_energy(0.2, -1.0, 1.0, &cfg), Err(Error::Domain(_))));
}

#[test]
fn moving_self_energy_matches_angular_quadrature() {
    // Σ(P) = -(g^2/8π^2) ∫_0^K dk ∫_{-1}^{1} dμ k / (k^2/2 - P k μ + k)
    let cfg = QuadConfig::default();
    let (p, k, g) = (0.4, 6.0, 0.8);
    let inner = |kk: f64| simpson(|mu| 1.0 / (0.5 * kk - p * mu + 1.0), -1.0, 1.0, 2000);
    let oracle = -g * g / (8.0 * PI * PI) * simpson(inner, 0.0, k, 2000);
    assert!(rel(pt_self_energy(p, k, g, &cfg).unwrap(), oracle) < 1e-8);
}

#[test]
fn self_energy_diverges_logarithmically() {
    let cfg = QuadConfig::default();
    // the exact difference approaches -ln2/(2π^2) like 1/K
    let k = 1e5;
    let d = pt_self_energy(0.0, 2.0 * k, 1.0, &cfg).unwrap() - pt_self_energy(0.0, k, 1.0, &cfg).unwrap();
    assert!((d + 2f64.ln() / (2.0 * PI * PI)).abs() < 1e-6);
}

#[test]
fn perturbative_mass_examples() {
    assert_eq!(pt_mass(0.0), 1.0);
    assert!((pt_mass(1.0) - 1.016_886_9).abs() < 1e-7);
    // -(g^2/16π^3) ∫ d^3k (P·k)^2 / (k (k^2/2 + k)^3), angular average P^2 k^2/3:
    // coefficient of P^2/2 is (1/3π^2) ∫_0^∞ dk / (1 + k/2)^3 = 1/(3π^2); m - 1 ≈ g^2/(6π^2)
    let radial = simpson(|k| 1.0 / (1.0 + 0.5 * k).powi(3), 0.0, 4000.0, 4_000_000);
    let coefficient = radial / (6.0 * PI * PI);
    assert!((coefficient - 1.0 / (6.0 * PI * PI)).abs() < 1e-6);
    assert!(rel(pt_mass(1.0) - 1.0, coefficient) < 1e-6);
}

#[test]
fn parameters_validate() {
    assert!(ModelParams::new(0.0, 1.0).is_ok());
    assert!(matches!(ModelParams::new(-0.1, 1.0), Err(Error::Domain(_))));
    assert!(matches!(ModelParams::new(0.1, 0.0), Err(Error::Domain(_))));
    assert!(matches!(ModelParams::new(f64::NAN, 1.0), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn squared_ratio_doubles_the_exponent(q in 0.0f64..20.0, lambda in 0.1f64..10.0) {
        let r = phi_ratio(q, lambda);
        prop_assert!((r * r - (-q * q / (lambda * lambda)).exp()).abs() <= 1e-15);
        prop_assert!(r > 0.0 || q > 0.0);
        prop_assert!(r <= 1.0);
    }

    #[test]
    fn field_amplitude_is_negative(k in 1e-3f64..30.0, lambda in 0.1f64..10.0) {
        prop_assert!(u_reduced(k, lambda).unwrap() <= 0.0);
    }

    #[test]
    fn self_energy_decreases_with_cutoff(k in 0.1f64..100.0, p in 0.0f64..0.9) {
        let cfg = QuadConfig::default();
        let a = pt_self_energy(p, k, 1.0, &cfg).unwrap();
        let b = pt_self_energy(p, 1.5 * k, 1.0, &cfg).unwrap();
        prop_assert!(a < 0.0 && b < a);
    }
}
