mod common;

use std::f64::consts::PI;

use common::{erf_series, fit, rel, simpson, solve};
use proptest::prelude::*;
use uvreg::zeroth::*;
use uvreg::{Error, QuadConfig};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn weak_minimum_per_g2() -> f64 {
    -(4.0 - SQRT_2).powi(2) / (32.0 * PI)
}

#[test]
fn weak_energy_examples() {
    assert_eq!(e0_weak(0.0, 3.0), 0.0);
    let l = lambda_opt_weak();
    for g in [0.01, 0.3, 2.0] {
        assert!(rel(e0_weak(g, l), g * g * weak_minimum_per_g2()) < 1e-14);
    }
    assert!((weak_minimum_per_g2() + 0.066_509_771_458_744).abs() < 1e-14);
}

#[test]
fn alpha_matches_published_value_and_simpson() {
    let a = alpha_constant();
    assert!((a - 0.736_559).abs() < 1e-4);
    // α = -∫ u^{-2}(4u - e^{2u^2/3}√(6π) erf(√(2/3)u)) e^{-3u^2/2}, with an independent erf
    let f = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let e = (6.0 * PI).sqrt() * erf_series((2.0f64 / 3.0).sqrt() * u) * (-5.0 * u * u / 6.0).exp();
        (4.0 * u * (-1.5 * u * u).exp() - e) / (u * u)
    };
    let oracle = -simpson(f, 0.0, 12.0, 200_000);
    assert!((a - oracle).abs() < 1e-10, "{a} vs {oracle}");
}

#[test]
fn alpha_integrand_limits() {
    assert!(alpha_integrand(1e-8).abs() < 1e-7);
    assert!((alpha_integrand(1e-3) / 1e-3 + 16.0 / 9.0).abs() < 1e-5);
    assert!(alpha_integrand(10.0).abs() < 1e-30);
    // series and closed form agree at the switch
    let below = alpha_integrand(0.02 * (1.0 - 1e-12));
    let above = alpha_integrand(0.02 * (1.0 + 1e-12));
    // the closed form loses ~9/(4u^2) ulps to cancellation here
    assert!((below - above).abs() < 1e-10 * below.abs());
}

#[test]
fn full_energy_examples() {
    assert_eq!(e0_full(0.0, 2.0), 0.0);
    let (g, l) = (0.4, 3.1);
    let diff = e0_full(g, l) - e0_weak(g, l);
    assert!(rel(diff, -g.powi(4) * l * l * alpha_constant() / (256.0 * PI.powi(4))) < 1e-12);
    // expansion at the optimum: -g^2(4-√2)^2/32π - 3αg^4(4-√2)^2/(2^10 π^3) + O(g^6)
    for g in [0.05f64, 0.1] {
        let l = lambda_opt(g).unwrap();
        let series = g * g * weak_minimum_per_g2() - 3.0 * alpha_constant() * g.powi(4) * (4.0 - SQRT_2).powi(2) / (1024.0 * PI.powi(3));
        assert!((e0_full(g, l) - series).abs() < 1e-4 * g.powi(6), "g = {g}");
    }
}

#[test]
fn width_examples() {
    let l0 = lambda_opt(0.0).unwrap();
    assert!(rel(l0, 3f64.sqrt() * PI.sqrt() * (4.0 - SQRT_2) / 2.0) < 1e-10);
    assert!((l0 - 3.9692).abs() < 1e-4);
    let g = 1e-2;
    let slope = (lambda_opt(g).unwrap() / l0 - 1.0) / (g * g);
    assert!(rel(slope, 3.0 * alpha_constant() / (32.0 * PI * PI)) < 1e-4);
    for g in [0.0, 0.1, 1.0, 5.0] {
        assert!(rel(lambda_opt(g).unwrap(), lambda_opt_closed_form(g)) < 1e-10);
    }
    assert!(matches!(lambda_opt(-1.0), Err(Error::Domain(_))));
    assert!(matches!(lambda_opt(11.0), Err(Error::Domain(_))));
}

#[test]
fn width_is_stationary() {
    for g in [0.01, 0.1, 1.0] {
        let l = lambda_opt(g).unwrap();
        let h = 1e-4 * l;
        let d = (e0_full(g, l + h) - e0_full(g, l - h)) / (2.0 * h);
        assert!(d.abs() < 1e-8 * e0_full(g, l).abs(), "g = {g}: {d}");
        assert!(e0_full(g, l) <= e0_weak(g, l));
    }
}

#[test]
fn moving_energy_reduces_at_rest() {
    let cfg = QuadConfig::default();
    for l in [1.0, lambda_opt_weak(), 6.0] {
        assert!(rel(e0_weak_moving(0.0, 0.7, l, &cfg).unwrap(), e0_weak(0.7, l)) < 1e-9);
    }
    assert!(matches!(e0_weak_moving(-0.1, 1.0, 1.0, &cfg), Err(Error::Domain(_))));
}

fn moving_curve(lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let cfg = QuadConfig::default();
    let ps = vec![0.0, 0.02, 0.04, 0.06];
    let ys = ps.iter().map(|&p| 0.5 * p * p + e0_weak_moving(p, 1.0, lambda, &cfg).unwrap()).collect();
    (ps, ys)
}

#[test]
fn moving_energy_has_no_linear_term_and_matches_the_small_momentum_law() {
    for lambda in [2.5, lambda_opt_weak()] {
        let (ps, ys) = moving_curve(lambda);
        let c = fit(&ps, &ys, &[0, 1, 2, 4]);
        assert!(c[1].abs() < 1e-8, "linear term {}", c[1]);
        // 1/m = 1 - (g^2/9π^2)(2/3 + √(6π)(√2 - 1)/(6λ))
        let inv_mass = 1.0 - (2.0 / 3.0 + (6.0 * PI).sqrt() * (SQRT_2 - 1.0) / (6.0 * lambda)) / (9.0 * PI * PI);
        assert!(rel(2.0 * c[2], inv_mass) < 1e-6, "lambda = {lambda}");
    }
}

#[test]
fn mass_from_finite_differences() {
    let (ps, ys) = moving_curve(lambda_opt(0.0).unwrap());
    let a: Vec<Vec<f64>> = ps.iter().map(|&p| vec![1.0, p, p * p, p.powi(4)]).collect();
    let c = solve(a, ys);
    let coefficient = 1.0 - 2.0 * c[2];
    assert!(rel(coefficient, mass0_coefficient()) < 1e-4);
}

#[test]
fn mass_examples() {
    assert_eq!(mass0(0.0), 1.0);
    assert!((mass0_coefficient() - (17.0 - SQRT_2) / (189.0 * PI * PI)).abs() < 1e-12);
    assert!((mass0_coefficient() - 0.008_355_4).abs() < 1e-7);
    let ratio = mass0_coefficient() * 6.0 * PI * PI;
    assert!((ratio - 0.495).abs() < 1e-3);
    // the small-momentum inverse-mass bracket at the weak optimum reduces to (17 - √2)/21
    let l = lambda_opt_weak();
    let bracket = 2.0 / 3.0 + (6.0 * PI).sqrt() * (SQRT_2 - 1.0) / (6.0 * l);
    assert!(rel(bracket, (17.0 - SQRT_2) / 21.0) < 1e-14);
}

#[test]
fn zeroth_bundle() {
    let z = zeroth(0.0, None).unwrap();
    assert_eq!((z.e0_weak, z.e0_full, z.mass0), (0.0, 0.0, 1.0));
    let z = zeroth(0.1, Some(2.0)).unwrap();
    assert_eq!(z.lambda_opt, 2.0);
    assert_eq!(z.e0_weak, e0_weak(0.1, 2.0));
    assert!(matches!(zeroth(0.1, Some(-1.0)), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn weak_energy_scales_as_g_squared(g in 0.0f64..3.0, l in 0.5f64..10.0) {
        prop_assert!((e0_weak(2.0 * g, l) - 4.0 * e0_weak(g, l)).abs() <= 1e-14 * e0_weak(g, l).abs().max(1e-300));
    }

    #[test]
    fn optimum_is_a_minimum(g in 0.0f64..3.0, d in 0.01f64..1.0) {
        let l = lambda_opt(g).unwrap();
        prop_assert!(e0_full(g, l) <= e0_full(g, l + d));
        prop_assert!(e0_full(g, l) <= e0_full(g, l - d));
        prop_assert!(mass0(g) >= 1.0);
    }
}
