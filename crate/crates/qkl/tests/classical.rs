mod common;

use common::{bessel_k_oracle, stirling_ln_gamma};
use proptest::prelude::*;
use qkl::classical_bessel::{bessel_k, ln_gamma, resolvent_tilde, tilde_m, tilde_rho, tilde_s, tilde_s_closed};
use qkl::cmath::{c, rel_err};
use qkl::QuadConfig;
use std::f64::consts::PI;

fn cfg() -> QuadConfig {
    QuadConfig::with_tol(1e-16, 1e-13)
}

#[test]
fn gamma_matches_stirling() {
    for z in [c(0.5, 0.0), c(3.2, 1.7), c(-2.4, 0.3), c(0.1, -4.0), c(7.0, 12.0)] {
        let a = ln_gamma(z).exp();
        let o = stirling_ln_gamma(z).exp();
        assert!(rel_err(a, o, 0.0) < 1e-12, "z={z} {a} {o}");
    }
}

#[test]
fn k_matches_series_oracle() {
    for (x, k) in [(0.0, 1.0), (-1.5, 0.4), (0.7, 1.8), (1.2, 0.2)] {
        let a = bessel_k(x, k, &cfg()).unwrap();
        let o = bessel_k_oracle(x, k);
        assert!(rel_err(a, o, 0.0) < 1e-10, "x={x} k={k} {a} {o}");
    }
}

#[test]
fn resolvent_derivative_jump() {
    let k = c(0.3, 0.4);
    let (y, h) = (0.2, 1e-4);
    let r = |x: f64| resolvent_tilde(x, y, k, &cfg()).unwrap();
    let right = (r(y + 2.0 * h) - r(y + h)) / h;
    let left = (r(y - h) - r(y - 2.0 * h)) / h;
    let jump = right - left;
    assert!((jump - 1.0).norm() < 1e-3, "{jump}");
}

#[test]
fn density_matches_m() {
    for k in [0.2, 0.9, 2.5] {
        let m = tilde_m(c(k, 0.0)).unwrap();
        let lhs = 1.0 / (2.0 * PI * m.norm_sqr());
        assert!((lhs - tilde_rho(k)).abs() < 1e-12 * tilde_rho(k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scattering_is_unimodular(k in 0.01f64..5.0) {
        let s = tilde_s(k).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        prop_assert!(rel_err(s, tilde_s_closed(k), 0.0) < 1e-10);
    }

    #[test]
    fn k_is_real_and_even(x in -2.0f64..1.5, k in 0.05f64..2.0) {
        let a = bessel_k(x, k, &cfg()).unwrap();
        let m = bessel_k(x, -k, &cfg()).unwrap();
        prop_assert!(a.im.abs() < 1e-12 * a.norm().max(1e-300));
        prop_assert!(rel_err(a, m, 0.0) < 1e-10);
    }
}
