//! The modular quantum dilogarithm `γ(z)`.
//!
//! Inside the strip `|Im z| < |ω''|`,
//!
//! ```text
//! ln γ(z) = 1/4 ∫ e^{itz} / (sinh(t/2b) sinh(bt/2) t) dt
//! ```
//!
//! over the line `Im t = δ`, `δ = min(2πb, 2π/b)/4`. Elsewhere `γ` is
//! continued with the shift equations
//! `γ(w + iP/2) = (1 + e^{-2πPw}) γ(w - iP/2)` for `P ∈ {b, 1/b}` and, for
//! `Re z < -1`, with the reflection `γ(z)γ(-z) = e^{iβ + iπz²}`.
//! Values are carried as logarithms so that the Gaussian growth of the
//! continuation never overflows.

use crate::cmath::{c, inv_sinh, ln_1p_exp, ln_sinh, rel_err, I};
use crate::contour_quadrature::{gauss_legendre, integrate, shifted_line, QuadConfig};
use crate::error::{Error, Result};
use crate::params::LatticeParams;
use crate::C64;
use std::f64::consts::PI;

/// Radius around lattice poles and zeros inside which values are flagged.
pub const EXCLUSION_RADIUS: f64 = 1e-8;

/// `γ(z)` stored as `mantissa · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    pub mantissa: C64,
    pub log_scale: f64,
    pub at_pole: bool,
    pub at_zero: bool,
}

impl GammaValue {
    /// Builds the value from a complex logarithm.
    pub fn from_ln(l: C64) -> Self {
        Self { mantissa: C64::from_polar(1.0, l.im), log_scale: l.re, at_pole: false, at_zero: false }
    }

    fn pole() -> Self {
        Self { mantissa: c(f64::NAN, f64::NAN), log_scale: f64::INFINITY, at_pole: true, at_zero: false }
    }

    fn zero() -> Self {
        Self { mantissa: c(0.0, 0.0), log_scale: 0.0, at_pole: false, at_zero: true }
    }

    /// The plain complex value; may overflow to infinity or underflow to zero.
    pub fn value(&self) -> C64 {
        if self.at_zero {
            return c(0.0, 0.0);
        }
        self.mantissa * self.log_scale.exp()
    }

    /// Complex logarithm of the value.
    pub fn ln(&self) -> Result<C64> {
        if self.at_pole {
            return Err(Error::Pole(c(f64::NAN, f64::NAN)));
        }
        if self.at_zero {
            return Err(Error::Zero(c(f64::NAN, f64::NAN)));
        }
        Ok(self.mantissa.ln() + self.log_scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LatticeHit {
    Pole,
    Zero,
}

/// Whether `z` lies within the exclusion radius of `±((2m+1)ω + (2n+1)ω')`.
fn lattice_hit(z: C64, p: &LatticeParams) -> Option<LatticeHit> {
    if z.re.abs() > EXCLUSION_RADIUS {
        return None;
    }
    let (y, kind) = if z.im > 0.0 { (z.im, LatticeHit::Zero) } else { (-z.im, LatticeHit::Pole) };
    let (w, wp) = (p.abs_omega(), p.abs_omega_prime());
    let mut m = 0.0;
    while (2.0 * m + 1.0) * w <= y + EXCLUSION_RADIUS {
        let rest = y - (2.0 * m + 1.0) * w;
        let n = ((rest / wp - 1.0) / 2.0).round().max(0.0);
        let d = (rest - (2.0 * n + 1.0) * wp).abs();
        if d.hypot(z.re) < EXCLUSION_RADIUS {
            return Some(kind);
        }
        m += 1.0;
    }
    None
}

/// Offset `δ` of the integration line above the real axis.
pub fn strip_delta(p: &LatticeParams) -> f64 {
    (2.0 * PI * p.b).min(2.0 * PI / p.b) / 4.0
}

/// The integrand `e^{itz} / (sinh(t/2b) sinh(bt/2) t)`.
#[inline]
fn strip_integrand(t: C64, z: C64, b: f64) -> C64 {
    let (u, v, e) = (t / (2.0 * b), t * (b / 2.0), I * t * z);
    if u.re.abs().max(v.re.abs()).max(e.re.abs()) < 300.0 {
        e.exp() * inv_sinh(u) * inv_sinh(v) / t
    } else {
        (e - ln_sinh(u) - ln_sinh(v)).exp() / t
    }
}

const STRIP_ORDER: usize = 20;
const STRIP_DECAY: f64 = 42.0;

/// `ln γ(z)` from the strip integral with a fixed composite rule.
///
/// For `Re z > 1/2` the two halves of the line are turned upwards by an
/// angle `θ` about `iδ`, which turns the oscillation of `e^{itz}` into
/// decay; no pole of the integrand lies between the line and the rays.
fn ln_gamma_strip_fixed(z: C64, p: &LatticeParams) -> C64 {
    let b = p.b;
    let delta = strip_delta(p);
    let wdd = p.abs_omega_dprime();
    let a_right = wdd + z.im;
    let a_left = wdd - z.im;
    let theta = if z.re > 0.5 { z.re.atan2(a_left.min(a_right)).min(1.0) } else { 0.0 };
    let (st, ct) = theta.sin_cos();
    let vertex = c(0.0, delta);
    let first_pole = c(0.0, 4.0 * delta);
    let osc = 10.0 / (z.norm() + 0.5);
    let extra = (-delta * z.re).max(0.0);
    let g = gauss_legendre(STRIP_ORDER);
    let up = C64::from_polar(1.0, theta);
    let up_left = C64::from_polar(1.0, -theta);
    // Right ray t = iδ + e^{iθ}s; left ray t = iδ - e^{-iθ}s, traversed towards the vertex.
    let rays = [(up, up, ct * a_right + st * z.re), (-up_left, up_left, ct * a_left + st * z.re)];
    let mut total = c(0.0, 0.0);
    for (dir, jac, rate) in rays {
        let s_max = (STRIP_DECAY + extra) / rate;
        let len_cap = osc.min(10.0 / rate);
        let mut sum = c(0.0, 0.0);
        let mut s = 0.0;
        while s < s_max {
            let t = vertex + dir * s;
            let dist = t.norm().min((t - first_pole).norm());
            let mut h = (1.5 * dist).min(len_cap);
            if s + 1.25 * h > s_max {
                h = s_max - s;
            }
            let mid = s + 0.5 * h;
            let half = 0.5 * h;
            for (x, w) in g.nodes.iter().zip(&g.weights) {
                let t = vertex + dir * (mid + half * x);
                sum += strip_integrand(t, z, b) * (half * w);
            }
            s += h;
        }
        total += jac * sum;
    }
    0.25 * total
}

/// `γ(z)` inside the strip `|Im z| ≤ |ω''|(1 - 10⁻³)` from the adaptive engine.
pub fn gamma_strip(z: C64, p: &LatticeParams, cfg: &QuadConfig) -> Result<GammaValue> {
    let wdd = p.abs_omega_dprime();
    if z.im.abs() > wdd * (1.0 - 1e-3) {
        return Err(Error::Domain(format!("z = {z} outside the strip |Im z| < {wdd}")));
    }
    let delta = strip_delta(p);
    let rate = wdd - z.im.abs();
    let t = (STRIP_DECAY + (delta * z.re.abs())) / rate;
    let line = shifted_line(delta, t, p.b)?;
    let b = p.b;
    let r = integrate(|t| strip_integrand(t, z, b), &line, cfg)?;
    Ok(GammaValue::from_ln(0.25 * r.value))
}

/// One step of the shift equation: returns `(z', Δ)` with `ln γ(z) = Δ + ln γ(z')`.
#[inline]
fn shift_step(z: C64, period: f64, down: bool) -> (C64, C64) {
    if down {
        let w = z - c(0.0, 0.5 * period);
        (z - c(0.0, period), ln_1p_exp(-2.0 * PI * period * w))
    } else {
        let w = z + c(0.0, 0.5 * period);
        (z + c(0.0, period), -ln_1p_exp(-2.0 * PI * period * w))
    }
}

fn ln_gamma_unchecked(z: C64, p: &LatticeParams) -> C64 {
    if z.re < -1.0 {
        return I * (p.beta + PI * z * z) - ln_gamma_unchecked(-z, p);
    }
    let big = p.b.max(1.0 / p.b);
    let small = p.b.min(1.0 / p.b);
    let mut z = z;
    let mut acc = c(0.0, 0.0);
    for period in [big, small] {
        while z.im.abs() > 0.5 * period * (1.0 + 1e-12) {
            let (nz, d) = shift_step(z, period, z.im > 0.0);
            acc += d;
            z = nz;
        }
    }
    acc + ln_gamma_strip_fixed(z, p)
}

/// `ln γ(z)` anywhere off the pole and zero lattices.
pub fn ln_gamma(z: C64, p: &LatticeParams) -> Result<C64> {
    match lattice_hit(z, p) {
        Some(LatticeHit::Pole) => Err(Error::Pole(z)),
        Some(LatticeHit::Zero) => Err(Error::Zero(z)),
        None => Ok(ln_gamma_unchecked(z, p)),
    }
}

/// Meromorphic continuation of `γ` to the whole plane; poles and zeros are flagged.
pub fn gamma(z: C64, p: &LatticeParams) -> GammaValue {
    match lattice_hit(z, p) {
        Some(LatticeHit::Pole) => GammaValue::pole(),
        Some(LatticeHit::Zero) => GammaValue::zero(),
        None => GammaValue::from_ln(ln_gamma_unchecked(z, p)),
    }
}

/// `γ(z1)/γ(z2)` computed from logarithms.
pub fn gamma_ratio(z1: C64, z2: C64, p: &LatticeParams) -> Result<C64> {
    Ok((ln_gamma(z1, p)? - ln_gamma(z2, p)?).exp())
}

/// Relative residuals of the two shift equations at `z`, using the strip
/// integral directly for all three values.
pub fn shift_residuals(z: C64, p: &LatticeParams, cfg: &QuadConfig) -> Result<(f64, f64)> {
    let wp = p.omega_prime;
    let w = p.omega;
    let a = gamma_strip(z + wp, p, cfg)?.value();
    let b = gamma_strip(z - wp, p, cfg)?.value() * (1.0 + (-PI * I * z / w).exp());
    let r1 = (a - b).norm() / a.norm();
    let a = gamma_strip(z + w, p, cfg)?.value();
    let b = gamma_strip(z - w, p, cfg)?.value() * (1.0 + (-PI * I * z / wp).exp());
    let r2 = (a - b).norm() / a.norm();
    Ok((r1, r2))
}

/// Relative residual of `γ(z)γ(-z) = e^{iβ + iπz²}`.
pub fn reflection_residual(z: C64, p: &LatticeParams) -> Result<f64> {
    let lhs = (ln_gamma(z, p)? + ln_gamma(-z, p)?).exp();
    let rhs = (I * (p.beta + PI * z * z)).exp();
    Ok(rel_err(lhs, rhs, 0.0))
}

/// Residual of `conj γ(z) = 1/γ(conj z)`.
pub fn conjugation_residual(z: C64, p: &LatticeParams) -> Result<f64> {
    let lhs = ln_gamma(z, p)?.exp().conj();
    let rhs = (-ln_gamma(z.conj(), p)?).exp();
    Ok(rel_err(lhs, rhs, 0.0))
}

/// Richardson estimate of `lim ε γ(ε - ω'')` from `ε` and `ε/2`.
pub fn residue_estimate(p: &LatticeParams, eps: f64) -> Result<C64> {
    let r = |e: f64| -> Result<C64> { Ok(e * ln_gamma(c(e, 0.0) - p.omega_dprime, p)?.exp()) };
    Ok(2.0 * r(0.5 * eps)? - r(eps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(b: f64) -> LatticeParams {
        LatticeParams::new(b).unwrap()
    }

    #[test]
    fn gamma_zero_squared() {
        for b in [0.6, 1.0, 1.4] {
            let p = params(b);
            let g = gamma(c(0.0, 0.0), &p).value();
            assert!(rel_err(g * g, (I * p.beta).exp(), 0.0) < 1e-13, "b={b}");
        }
    }

    #[test]
    fn fixed_and_adaptive_strip_agree() {
        let cfg = QuadConfig::with_tol(1e-15, 1e-14);
        for b in [0.6, 1.0, 1.4] {
            let p = params(b);
            for z in [c(0.0, 0.0), c(0.7, 0.2), c(-0.9, -0.25), c(3.0, 0.1), c(-0.4, 0.5 * b.min(1.0 / b))] {
                let a = gamma_strip(z, &p, &cfg).unwrap().ln().unwrap();
                let f = ln_gamma_strip_fixed(z, &p);
                assert!(rel_err(a.exp(), f.exp(), 0.0) < 1e-12, "b={b} z={z} {a} {f}");
            }
        }
    }

    #[test]
    fn unimodular_on_real_axis() {
        let p = params(1.0);
        assert!((gamma(c(0.7, 0.0), &p).value().norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reflection_example() {
        let p = params(1.0);
        assert!(reflection_residual(c(0.3, 0.2), &p).unwrap() < 1e-13);
    }

    #[test]
    fn zero_and_pole_flags() {
        let p = params(1.0);
        let z = gamma(p.omega_dprime, &p);
        assert!(z.at_zero && z.value() == c(0.0, 0.0));
        assert!(gamma(-p.omega_dprime, &p).at_pole);
        let p = params(0.7);
        assert!(gamma(-(3.0 * p.omega + p.omega_prime), &p).at_pole);
        assert!(gamma(3.0 * p.omega + 5.0 * p.omega_prime, &p).at_zero);
        assert!(!gamma(c(0.0, 0.3), &p).at_zero);
    }

    #[test]
    fn large_real_argument() {
        let p = params(1.0);
        assert!((gamma(c(10.0, 0.0), &p).value() - 1.0).norm() < 1e-6);
        let mut prev = f64::INFINITY;
        for x in [4.0, 6.0, 8.0, 10.0] {
            let d = (gamma(c(x, 0.0), &p).value() - 1.0).norm();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn ratio_examples() {
        let p = params(1.0);
        let z = c(0.4, 0.1);
        assert!((gamma_ratio(z, z, &p).unwrap() - 1.0).norm() < 1e-15);
        let r = gamma_ratio(c(0.3, 0.0), c(-0.3, 0.0), &p).unwrap();
        let g0 = gamma(c(-0.3, 0.0), &p).value();
        let expected = (I * (p.beta + PI * 0.09)).exp() / (g0 * g0);
        assert!(rel_err(r, expected, 0.0) < 1e-12);
        assert!((gamma_ratio(c(5.0, 0.0), c(6.0, 0.0), &p).unwrap() - 1.0).norm() < 1e-5);
        assert!(gamma_ratio(-p.omega_dprime, c(1.0, 0.0), &p).is_err());
    }

    #[test]
    fn residue_at_first_pole() {
        for b in [0.6, 1.0, 1.4] {
            let p = params(b);
            let r = residue_estimate(&p, 1e-3).unwrap();
            assert!((r - p.c_residue).norm() < 1e-5, "b={b} {r} {}", p.c_residue);
        }
    }

    #[test]
    fn continuation_consistent_with_strip() {
        let cfg = QuadConfig::with_tol(1e-15, 1e-14);
        let p = params(1.0);
        let z = c(0.3, 0.45);
        let direct = gamma_strip(z, &p, &cfg).unwrap().ln().unwrap();
        let stepped = ln_gamma(z, &p).unwrap();
        assert!(rel_err(direct.exp(), stepped.exp(), 0.0) < 1e-9);
    }

    #[test]
    fn far_continuation_stays_finite() {
        let p = params(0.6);
        for z in [c(0.3, 12.0), c(-7.0, -9.0), c(15.0, 4.0), c(-20.0, 0.5)] {
            let l = ln_gamma(z, &p).unwrap();
            assert!(l.re.is_finite() && l.im.is_finite(), "z={z}");
            assert!(reflection_residual(z, &p).unwrap() < 1e-9, "z={z}");
        }
    }
}
