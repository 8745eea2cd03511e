mod common;

use common::{erf_series, erfi_series, rel, simpson};

/// `e^{-x^2} ∫_0^x e^{t^2} dt = ∫_0^x e^{(t-x)(t+x)} dt`; the integrand is bounded by 1
/// and varies on the scale `1/2x` next to `t = x`, so that end gets its own panel set.
fn dawson_oracle(x: f64) -> f64 {
    let f = |t: f64| ((t - x) * (t + x)).exp();
    let c = (x - 1.0).max(0.0);
    simpson(f, 0.0, c, 200_000) + simpson(f, c, x, 200_000)
}
use proptest::prelude::*;
use uvreg::specfun::{dawson, erf, erf_scaled_product, erfi, erfi_scaled};

#[test]
fn erf_examples() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(6.0) - 1.0).abs() <= 1e-15);
    assert!(rel(erf(1.0), erf_series(1.0)) < 1e-14);
    assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
}

#[test]
fn erf_matches_series_on_a_grid() {
    for i in 1..=40 {
        let x = i as f64 * 0.1;
        assert!(rel(erf(x), erf_series(x)) < 1e-14, "x = {x}");
    }
}

#[test]
fn dawson_examples() {
    assert_eq!(dawson(0.0), 0.0);
    for x in [1e-4, 3e-5, 1e-8] {
        assert!(rel(dawson(x), x) < 1e-8);
    }
    let x: f64 = 10.0;
    let oracle = dawson_oracle(x);
    assert!(rel(dawson(x), oracle) < 1e-12);
    assert!((dawson(x) - 0.050_253_847_187_598_1).abs() < 1e-15);
}

#[test]
fn dawson_matches_quadrature_across_branches() {
    for x in [0.3, 0.49, 0.51, 1.0, 2.5, 7.0, 25.0, 49.0, 51.0, 80.0] {
        let oracle = dawson_oracle(x);
        assert!(rel(dawson(x), oracle) < 1e-11, "x = {x}: {} vs {oracle}", dawson(x));
        assert_eq!(dawson(-x), -dawson(x));
    }
}

#[test]
fn dawson_is_bounded_by_its_maximum() {
    for i in 0..2000 {
        let x = i as f64 * 0.01;
        let d = dawson(x);
        assert!((0.0..=0.5411).contains(&d), "x = {x}: {d}");
    }
}

#[test]
fn erfi_reconstruction_matches_series() {
    for i in 1..=20 {
        let x = i as f64 * 0.1;
        assert!(rel(erfi(x), erfi_series(x)) < 1e-10, "x = {x}");
        assert!(rel(erfi_scaled(x).to_f64(), erfi_series(x)) < 1e-10);
    }
}

#[test]
fn erfi_scaled_survives_past_overflow() {
    let s = erfi_scaled(40.0);
    // Erfi(x) ~ e^{x^2}/(x√π)
    let expected_log = 1600.0 - (40.0 * std::f64::consts::PI.sqrt()).ln();
    assert!((s.ln_abs() - expected_log).abs() < 1e-3);
}

#[test]
fn erf_scaled_product_examples() {
    assert_eq!(erf_scaled_product(0.0, 1.0).to_f64(), erf(1.0));
    assert!(erf_scaled_product(2.0 / 3.0, 0.0).is_zero());
    let s = erf_scaled_product(2.0 / 3.0, 30.0);
    assert!((s.ln_abs() - 600.0).abs() < 1e-10);
    let m = s.mantissa().abs();
    assert!((1.0..std::f64::consts::E).contains(&m));
}

proptest! {
    #[test]
    fn erf_is_odd(x in -10.0f64..10.0) {
        prop_assert_eq!(erf(-x), -erf(x));
    }

    #[test]
    fn dawson_solves_its_ode(x in 0.0f64..20.0) {
        let h = 1e-5;
        let d1 = (dawson(x + h) - dawson(x - h)) / (2.0 * h);
        prop_assert!((d1 + 2.0 * x * dawson(x) - 1.0).abs() < 1e-9);
    }
}
