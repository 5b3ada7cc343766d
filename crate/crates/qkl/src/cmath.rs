//! Small complex-arithmetic helpers shared by the numerical modules.

use crate::C64;
use std::f64::consts::PI;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `ln(1 + w)` accurate for small `|w|`.
pub fn ln_1p(w: C64) -> C64 {
    if w.norm() > 0.5 {
        return (C64::new(1.0, 0.0) + w).ln();
    }
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    C64::new(re, im)
}

/// `ln(1 + e^u)` without overflow; the imaginary part is defined modulo `2π`.
pub fn ln_1p_exp(u: C64) -> C64 {
    if u.re > 0.0 {
        u + ln_1p((-u).exp())
    } else {
        ln_1p(u.exp())
    }
}

/// `e^w - 1` accurate for small `|w|`.
pub fn exp_m1(w: C64) -> C64 {
    if w.norm() > 0.5 {
        return w.exp() - 1.0;
    }
    // e^{a+ib} - 1 = (e^a - 1) cos b + (cos b - 1) + i e^a sin b
    let em1 = w.re.exp_m1();
    let cosm1 = -2.0 * (0.5 * w.im).sin().powi(2);
    C64::new(em1 * w.im.cos() + cosm1, w.re.exp() * w.im.sin())
}

/// `1/sinh(w)` evaluated through `e^{-|Re w|}` so that large arguments do not overflow.
pub fn inv_sinh(w: C64) -> C64 {
    if w.re >= 0.0 {
        let e = (-w).exp();
        2.0 * e / (1.0 - e * e)
    } else {
        let e = w.exp();
        -2.0 * e / (1.0 - e * e)
    }
}

/// `ln sinh(w)` for `Re w` of either sign, branch unspecified.
pub fn ln_sinh(w: C64) -> C64 {
    if w.re >= 0.0 {
        w - std::f64::consts::LN_2 + ln_1p(-(-2.0 * w).exp())
    } else {
        -w - std::f64::consts::LN_2 + ln_1p(-(2.0 * w).exp()) + C64::new(0.0, PI)
    }
}

/// Relative distance `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: C64, b: C64, floor: f64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(floor)
}

/// Reduces the imaginary part of a logarithm to `(-π, π]`.
pub fn wrap_phase(z: C64) -> C64 {
    let mut im = z.im % (2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    } else if im <= -PI {
        im += 2.0 * PI;
    }
    C64::new(z.re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_1p_small_argument() {
        let w = c(1e-12, -3e-13);
        let v = ln_1p(w);
        assert!((v - w).norm() < 1e-24);
    }

    #[test]
    fn ln_1p_exp_large_positive() {
        let v = ln_1p_exp(c(800.0, 0.3));
        assert!((v - c(800.0, 0.3)).norm() < 1e-12);
    }

    #[test]
    fn exp_m1_matches_direct() {
        for &w in &[c(0.3, -0.2), c(-2.0, 1.0)] {
            let d = w.exp() - 1.0;
            assert!((exp_m1(w) - d).norm() <= 1e-15 * d.norm());
        }
        let w = c(1e-9, 2e-9);
        let taylor = w + w * w / 2.0;
        assert!((exp_m1(w) - taylor).norm() <= 1e-15 * w.norm());
    }

    #[test]
    fn inv_sinh_both_sides() {
        for &w in &[c(0.7, 0.2), c(-1.3, 0.5), c(40.0, 1.0)] {
            let d = 1.0 / w.sinh();
            assert!(rel_err(inv_sinh(w), d, 1e-300) < 1e-14);
        }
    }

    #[test]
    fn ln_sinh_exponentiates_back() {
        for &w in &[c(0.7, 0.2), c(-1.3, 0.5), c(3.0, -2.0)] {
            assert!(rel_err(ln_sinh(w).exp(), w.sinh(), 1e-300) < 1e-14);
        }
    }
}
