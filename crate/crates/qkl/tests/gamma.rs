mod common;

use common::trapezoid_ln_gamma;
use proptest::prelude::*;
use qkl::cmath::{c, rel_err};
use qkl::qdilog::{conjugation_residual, gamma, gamma_strip, ln_gamma, reflection_residual};
use qkl::{LatticeParams, QuadConfig, C64};
use std::f64::consts::PI;

#[test]
fn matches_trapezoid_oracle() {
    for b in [0.6, 1.0, 1.4] {
        let p = LatticeParams::new(b).unwrap();
        for z in [c(0.0, 0.0), c(0.7, 0.2), c(-1.3, -0.25), c(2.1, 0.1)] {
            let a = ln_gamma(z, &p).unwrap().exp();
            let o = trapezoid_ln_gamma(z, b).exp();
            assert!(rel_err(a, o, 0.0) < 1e-11, "b={b} z={z} {a} {o}");
        }
    }
}

#[test]
fn adaptive_strip_matches_oracle() {
    let p = LatticeParams::new(0.8).unwrap();
    let cfg = QuadConfig::with_tol(1e-15, 1e-13);
    let z = c(0.4, -0.3);
    let a = gamma_strip(z, &p, &cfg).unwrap().value();
    assert!(rel_err(a, trapezoid_ln_gamma(z, 0.8).exp(), 0.0) < 1e-11);
}

#[test]
fn value_at_zero_is_unimodular() {
    let p = LatticeParams::new(1.0).unwrap();
    let g = gamma(c(0.0, 0.0), &p).value();
    assert!((g.norm() - 1.0).abs() < 1e-13);
}

#[test]
fn pole_and_zero_are_flagged() {
    let p = LatticeParams::new(1.0).unwrap();
    assert!(ln_gamma(-p.omega_dprime, &p).is_err());
    assert!(ln_gamma(p.omega_dprime, &p).is_err());
}

fn away_from_lattice(z: C64, p: &LatticeParams) -> bool {
    [p.omega_dprime, -p.omega_dprime].iter().all(|w| (z - w).norm() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_holds(re in -3.0f64..3.0, im in -0.9f64..0.9, b in 0.6f64..1.6) {
        let p = LatticeParams::new(b).unwrap();
        let z = c(re, im);
        prop_assume!(away_from_lattice(z, &p));
        prop_assert!(reflection_residual(z, &p).unwrap() < 1e-9);
    }

    #[test]
    fn conjugation_holds(re in -3.0f64..3.0, im in -0.9f64..0.9, b in 0.6f64..1.6) {
        let p = LatticeParams::new(b).unwrap();
        let z = c(re, im);
        prop_assume!(away_from_lattice(z, &p));
        prop_assert!(conjugation_residual(z, &p).unwrap() < 1e-9);
    }

    #[test]
    fn shift_equation_off_the_strip(re in -2.0f64..2.0, im in -1.5f64..1.5, b in 0.6f64..1.6) {
        let p = LatticeParams::new(b).unwrap();
        let z = c(re, im);
        let lhs = ln_gamma(z + p.omega_prime, &p);
        let rhs = ln_gamma(z - p.omega_prime, &p);
        prop_assume!(lhs.is_ok() && rhs.is_ok());
        let factor = 1.0 + (-PI * c(0.0, 1.0) * z / p.omega).exp();
        prop_assume!(factor.norm() > 1e-3);
        let a = lhs.unwrap().exp();
        let bb = rhs.unwrap().exp() * factor;
        prop_assert!(rel_err(a, bb, 0.0) < 1e-9, "{} {}", a, bb);
    }

    #[test]
    fn modular_symmetry(re in -3.0f64..3.0, im in -0.5f64..0.5, b in 0.5f64..2.0) {
        let p = LatticeParams::new(b).unwrap();
        let z = c(re, im);
        let a = ln_gamma(z, &p).unwrap().exp();
        let d = ln_gamma(z, &p.dual()).unwrap().exp();
        prop_assert!(rel_err(a, d, 0.0) < 1e-10);
    }
}
