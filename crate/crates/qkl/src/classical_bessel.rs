//! Modified Bessel functions of the variable `e^x` from their Mellin-Barnes
//! integrals, the classical coefficients `M̃(k)`, `S̃(k)`, and the
//! Kontorovich-Lebedev transform. These are the `b → 0` companions of the
//! difference-equation objects and serve as an independent check layer.
//!
//! Conventions: the order is `ν = ik`, the spectral parameter `λ = k²` of
//! `-ψ'' + e^{2x}ψ = λψ`, and the Jost solutions behave as `e^{±ikx}` at
//! `x → -∞`.

use crate::cmath::{c, ln_sinh, rel_err, I};
use crate::contour_quadrature::{gauss_legendre, integrate, ContourSpec, QuadConfig, Segment};
use crate::error::{Error, Result};
use crate::spectral_transform::SampledFunction;
use crate::testfunctions::TestFunction;
use crate::C64;
use std::f64::consts::{LN_2, PI};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` on the principal sheet away from the poles; branch of the
/// imaginary part unspecified.
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let ln_sin = ln_sinh(I * PI * z) - I * (PI / 2.0);
        return PI.ln() - ln_sin - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut a = c(LANCZOS[0], 0.0);
    for (j, p) in LANCZOS.iter().enumerate().skip(1) {
        a += *p / (z + j as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(z)`; infinite at the non-positive integers.
pub fn gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return c(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// `I_ν(z) = Σ (z/2)^{ν+2m} / (m! Γ(m+ν+1))`, summed until the terms are negligible.
pub fn bessel_i_series(z: C64, nu: C64) -> C64 {
    let h = 0.5 * z;
    let mut term = (nu * h.ln() - ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let h2 = h * h;
    for m in 1..500 {
        let m = m as f64;
        term *= h2 / (m * (m + nu));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() && m > h.norm() {
            break;
        }
    }
    sum
}

/// `K_ν(z) = π/(2 sin πν) (I_{-ν}(z) - I_ν(z))` from the power series.
pub fn bessel_k_series(z: C64, nu: C64) -> C64 {
    PI / (2.0 * (PI * nu).sin()) * (bessel_i_series(z, -nu) - bessel_i_series(z, nu))
}

/// A point of the classical spectrum: order `ν = ik`, `λ = k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSpectralPoint {
    pub k: f64,
    pub nu: C64,
    pub lambda_tilde: f64,
}

impl ClassicalSpectralPoint {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("classical spectral point needs k > 0, got {k}")));
        }
        Ok(Self { k, nu: c(0.0, k), lambda_tilde: k * k })
    }
}

/// `ln[(e^x/2)^{-s} Γ((s-ν)/2) Γ((s+ν)/2)]`.
fn mb_log(s: C64, nu: C64, x: C64) -> C64 {
    -s * (x - LN_2) + ln_gamma(0.5 * (s - nu)) + ln_gamma(0.5 * (s + nu))
}

/// The contour `Re s = σ` for `K_ν`, bent around the poles `±ν` when they lie on it.
fn k_contour(nu: C64, t: f64) -> ContourSpec {
    let mut ct = ContourSpec::new("mellin-barnes-K");
    if nu.re.abs() > 1e-14 {
        let s = nu.re.abs() + 0.5;
        ct = ct.with_segment(Segment::line(c(s, -t), c(s, t)));
    } else {
        let k = nu.im.abs();
        if k >= 0.1 {
            let r = 0.1 * (2.0 * k).min(1.0);
            ct = ct
                .with_segment(Segment::line(c(0.0, -t), c(0.0, -k - r)))
                .with_segment(Segment::arc(c(0.0, -k), r, -PI / 2.0, PI / 2.0))
                .with_segment(Segment::line(c(0.0, -k + r), c(0.0, k - r)))
                .with_segment(Segment::arc(c(0.0, k), r, -PI / 2.0, PI / 2.0))
                .with_segment(Segment::line(c(0.0, k + r), c(0.0, t)));
        } else {
            let r = 0.2;
            ct = ct
                .with_segment(Segment::line(c(0.0, -t), c(0.0, -r)))
                .with_segment(Segment::arc(c(0.0, 0.0), r, -PI / 2.0, PI / 2.0))
                .with_segment(Segment::line(c(0.0, r), c(0.0, t)));
        }
    }
    ct.truncation = Some(t);
    ct
}

fn k_truncation(nu: C64, x_im: f64) -> f64 {
    nu.norm() + 40.0 / (PI / 2.0 - x_im.abs())
}

/// `K_ν(e^x)` for complex `x` with `|Im x| < π/2` and any order `ν`.
pub fn bessel_k_complex(x: C64, nu: C64, cfg: &QuadConfig) -> Result<C64> {
    if x.im.abs() >= PI / 2.0 - 0.05 {
        return Err(Error::Domain(format!("Mellin-Barnes integral for K needs |Im x| < π/2, got x = {x}")));
    }
    if x.re > 6.5 {
        // K_ν(e^x) ~ e^{-e^x} is below the double-precision range
        return Ok(c(0.0, 0.0));
    }
    let t = k_truncation(nu, x.im);
    let ct = k_contour(nu, t);
    let v = integrate(|s| mb_log(s, nu, x).exp(), &ct, cfg)?.value;
    Ok(v / (8.0 * PI * I))
}

/// `K_{ik}(e^x)`, real for real `x` and `k`.
pub fn bessel_k(x: f64, k: f64, cfg: &QuadConfig) -> Result<C64> {
    bessel_k_complex(c(x, 0.0), c(0.0, k), cfg)
}

fn check_order(nu: C64) -> Result<()> {
    if nu.im.abs() < 1e-12 && (nu.re - nu.re.round()).abs() < 1e-12 {
        return Err(Error::Degenerate(format!("integer order ν = {nu}")));
    }
    Ok(())
}

/// The bent contour `C`: in along `Im s = -Y` from the left, up along
/// `Re s = X`, and out along `Im s = Y`, enclosing the poles `-ν - 2n`.
fn i_contour(nu: C64, x: C64) -> ContourSpec {
    let y = nu.im.abs() + 1.0;
    let xr = nu.re.abs() + 1.0;
    let fac = |s: C64| (-PI * I * nu).exp() - (-PI * I * s).exp();
    let lnmag = |s: C64| mb_log(s, nu, x).re + fac(s).norm().ln();
    let peak = lnmag(c(xr, 0.0)).max(lnmag(c(xr, y))).max(lnmag(c(xr, -y)));
    let mut t = 10.0 + xr;
    while lnmag(c(-t, y)).max(lnmag(c(-t, -y))) > peak - 45.0 && t < 1e4 {
        t *= 1.3;
    }
    let mut ct = ContourSpec::polyline("mellin-barnes-C", &[c(-t, -y), c(xr, -y), c(xr, y), c(-t, y)]);
    ct.truncation = Some(t);
    ct
}

/// `I_ν(e^x)` for complex `x`.
pub fn bessel_i_complex(x: C64, nu: C64, cfg: &QuadConfig) -> Result<C64> {
    check_order(nu)?;
    let ct = i_contour(nu, x);
    let a = (-PI * I * nu).exp();
    let v = integrate(|s| mb_log(s, nu, x).exp() * (a - (-PI * I * s).exp()), &ct, cfg)?.value;
    Ok(-v / (8.0 * PI * PI))
}

/// `I_ν(e^x)`.
pub fn bessel_i(x: f64, nu: C64, cfg: &QuadConfig) -> Result<C64> {
    bessel_i_complex(c(x, 0.0), nu, cfg)
}

/// `d/dx I_ν(e^x)` by central differences with step `h`.
pub fn bessel_i_dx(x: f64, nu: C64, h: f64, cfg: &QuadConfig) -> Result<C64> {
    Ok((bessel_i(x + h, nu, cfg)? - bessel_i(x - h, nu, cfg)?) / (2.0 * h))
}

/// Relative residual of `I_{-ν}I'_ν - I'_{-ν}I_ν = 2 sin(πν)/π`, derivatives in `x`.
pub fn wronskian_residual(x: f64, nu: C64, cfg: &QuadConfig) -> Result<f64> {
    let h = 1e-4;
    let w = bessel_i(x, -nu, cfg)? * bessel_i_dx(x, nu, h, cfg)? - bessel_i_dx(x, -nu, h, cfg)? * bessel_i(x, nu, cfg)?;
    Ok(rel_err(w, 2.0 * (PI * nu).sin() / PI, 0.0))
}

/// Relative residual of `I_ν(e^{x+πi}) = e^{πiν} I_ν(e^x)`.
pub fn quasi_periodicity_residual(x: f64, nu: C64, cfg: &QuadConfig) -> Result<f64> {
    let a = bessel_i_complex(c(x, PI), nu, cfg)?;
    let b = (PI * I * nu).exp() * bessel_i(x, nu, cfg)?;
    Ok(rel_err(a, b, 0.0))
}

/// Largest relative residual of
/// `K_ν(e^x) = π/(2 sin πν)(I_{-ν}(e^x) - I_ν(e^x))` and
/// `I_ν(e^x) = (e^{-πiν}K_ν(e^x) - K_ν(e^{x+πi}))/(πi)`, where
/// `K_ν(e^{x+πi})` is built from `I_{±ν}(e^{x+πi})`.
pub fn k_to_i_relation_check(x: f64, nu: C64, cfg: &QuadConfig) -> Result<f64> {
    check_order(nu)?;
    let xx = c(x, 0.0);
    let pref = PI / (2.0 * (PI * nu).sin());
    let k = bessel_k_complex(xx, nu, cfg)?;
    let ip = bessel_i_complex(xx, nu, cfg)?;
    let im = bessel_i_complex(xx, -nu, cfg)?;
    let r1 = rel_err(k, pref * (im - ip), 0.0);
    let xr = c(x, PI);
    let k_rot = pref * (bessel_i_complex(xr, -nu, cfg)? - bessel_i_complex(xr, nu, cfg)?);
    let rhs = ((-PI * I * nu).exp() * k - k_rot) / (PI * I);
    let r2 = rel_err(ip, rhs, 0.0);
    Ok(r1.max(r2))
}

/// `M̃(k) = 2^{-1-ik} Γ(-ik)`.
pub fn tilde_m(k: C64) -> Result<C64> {
    if k.norm() < 1e-300 {
        return Err(Error::Pole(k));
    }
    Ok(((-1.0 - I * k) * LN_2 + ln_gamma(-I * k)).exp())
}

/// `S̃(k) = M̃(-k)/M̃(k)`.
pub fn tilde_s(k: f64) -> Result<C64> {
    let k = c(k, 0.0);
    Ok(tilde_m(-k)? / tilde_m(k)?)
}

/// `S̃(k) = -2^{2ik} Γ(1+ik)/Γ(1-ik)`.
pub fn tilde_s_closed(k: f64) -> C64 {
    let k = c(k, 0.0);
    -(2.0 * I * k * LN_2 + ln_gamma(1.0 + I * k) - ln_gamma(1.0 - I * k)).exp()
}

/// `ρ̃(k) = 2k sinh(πk)/π²`.
pub fn tilde_rho(k: f64) -> f64 {
    2.0 * k * (PI * k).sinh() / (PI * PI)
}

/// Classical Jost solutions `f̃±(x,k) = Γ(1±ik) 2^{±ik} I_{±ik}(e^x)`.
pub fn jost_tilde(x: f64, k: C64, sign: f64, cfg: &QuadConfig) -> Result<C64> {
    let nu = sign * I * k;
    Ok((ln_gamma(1.0 + nu) + nu * LN_2).exp() * bessel_i(x, nu, cfg)?)
}

/// Relative residual of `K_{ik}(e^x) = M̃(k)f̃₊(x,k) + M̃(-k)f̃₋(x,k)`.
pub fn connection_residual(x: f64, k: f64, cfg: &QuadConfig) -> Result<f64> {
    let kk = c(k, 0.0);
    let lhs = bessel_k(x, k, cfg)?;
    let rhs = tilde_m(kk)? * jost_tilde(x, kk, 1.0, cfg)? + tilde_m(-kk)? * jost_tilde(x, kk, -1.0, cfg)?;
    Ok(rel_err(lhs, rhs, 0.0))
}

/// Relative residual of `-ψ'' + e^{2x}ψ = k²ψ` for `ψ = K_{ik}(e^x)`, with the
/// second derivative from central differences of step `h`.
pub fn ode_residual(x: f64, k: f64, h: f64, cfg: &QuadConfig) -> Result<f64> {
    let f = |t: f64| bessel_k(t, k, cfg);
    let (a, m, b) = (f(x - h)?, f(x)?, f(x + h)?);
    let d2 = (a - 2.0 * m + b) / (h * h);
    let v = (2.0 * x).exp() * m;
    let l = k * k * m;
    let scale = d2.norm().max(v.norm()).max(l.norm());
    Ok((-d2 + v - l).norm() / scale)
}

/// `R̃(x,y;λ) = [f̃₋(x)φ̃(y)θ(y-x) + f̃₋(y)φ̃(x)θ(x-y)] / (2ik M̃(k))` for `Im k > 0`,
/// with `φ̃ = K_{ik}(e^x)`. Its x-derivative jumps by +1 at `x = y`, so this is the
/// kernel of `(k² - H̃)^{-1}` for `H̃ = -d²/dx² + e^{2x}`.
pub fn resolvent_tilde(x: f64, y: f64, k: C64, cfg: &QuadConfig) -> Result<C64> {
    if k.im <= 0.0 {
        return Err(Error::Domain(format!("classical resolvent needs Im k > 0, got {k}")));
    }
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let f = jost_tilde(lo, k, -1.0, cfg)?;
    let phi = bessel_k_complex(c(hi, 0.0), I * k, cfg)?;
    Ok(f * phi / (2.0 * I * k * tilde_m(k)?))
}

/// Relative residual of `-R̃'' + (e^{2x} - k²)R̃ = 0` in `x` at `x ≠ y`.
pub fn resolvent_tilde_residual(x: f64, y: f64, k: C64, cfg: &QuadConfig) -> Result<f64> {
    let h = 1e-3;
    if (x - y).abs() <= 2.0 * h {
        return Err(Error::Singular("residual needs |x - y| > 2h".into()));
    }
    let f = |t: f64| resolvent_tilde(t, y, k, cfg);
    let (a, m, b) = (f(x - h)?, f(x)?, f(x + h)?);
    let d2 = (a - 2.0 * m + b) / (h * h);
    let v = ((2.0 * x).exp() - k * k) * m;
    Ok((-d2 + v).norm() / d2.norm().max(v.norm()))
}

/// `ψ̃(k) = ∫ψ(x)K_{ik}(e^x)dx`, evaluated as
/// `(1/8πi)∫2^s Γ((s-ik)/2)Γ((s+ik)/2) ψ̂(s/2πi) ds` on the contour of `K`.
pub fn kl_forward_at(psi: &TestFunction, k: f64, cfg: &QuadConfig) -> Result<C64> {
    let nu = c(0.0, k);
    let f = psi.fourier();
    let ct = k_contour(nu, k_truncation(nu, 0.0));
    let g =
        |s: C64| (s * LN_2 + ln_gamma(0.5 * (s - nu)) + ln_gamma(0.5 * (s + nu))).exp() * f.eval(s / (2.0 * PI * I));
    Ok(integrate(g, &ct, cfg)?.value / (8.0 * PI * I))
}

/// `ψ̃(k)` by quadrature in `x`, for cross-checks.
pub fn kl_forward_direct(psi: &TestFunction, k: f64, cfg: &QuadConfig) -> Result<C64> {
    let (lo, hi) = psi.support(6.0);
    let rule = ContourSpec::polyline("kl-x", &[c(lo, 0.0), c(hi.min(4.0), 0.0)]).rule(20, |_| 0.25);
    let mut acc = c(0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * psi.eval(*x) * bessel_k(x.re, k, cfg)?;
    }
    Ok(acc)
}

/// Discretization of `∫₀^{k_max} dk` for the classical transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlConfig {
    pub k_max: f64,
    pub k_panel: f64,
    pub k_order: usize,
}

impl Default for KlConfig {
    fn default() -> Self {
        Self { k_max: 20.0, k_panel: 1.0, k_order: 16 }
    }
}

impl KlConfig {
    pub fn k_rule(&self) -> (Vec<f64>, Vec<f64>) {
        let g = gauss_legendre(self.k_order);
        let n = (self.k_max / self.k_panel).ceil().max(1.0) as usize;
        let h = self.k_max / n as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for j in 0..n {
            let mid = (j as f64 + 0.5) * h;
            for (t, w) in g.nodes.iter().zip(&g.weights) {
                nodes.push(mid + 0.5 * h * t);
                weights.push(0.5 * h * w);
            }
        }
        (nodes, weights)
    }
}

/// `ψ̃(k_j)` on the rule of `kl`, carrying its weights.
pub fn kl_forward(psi: &TestFunction, kl: &KlConfig, cfg: &QuadConfig) -> Result<SampledFunction> {
    let (nodes, weights) = kl.k_rule();
    let values = nodes.iter().map(|&k| kl_forward_at(psi, k, cfg)).collect::<Result<Vec<_>>>()?;
    Ok(SampledFunction { grid: nodes.iter().map(|&k| c(k, 0.0)).collect(), values, weights: Some(weights) })
}

/// `ψ(x) = (2/π²)∫₀^{k_max} ψ̃(k)K_{ik}(e^x) k sinh(πk) dk`.
pub fn kl_inverse(coeffs: &SampledFunction, xs: &[f64], cfg: &QuadConfig) -> Result<SampledFunction> {
    let w = coeffs
        .weights
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("inverse transform needs quadrature weights".into()))?;
    let mut values = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut acc = c(0.0, 0.0);
        for ((k, u), wk) in coeffs.grid.iter().zip(&coeffs.values).zip(w) {
            acc += u * bessel_k(x, k.re, cfg)? * tilde_rho(k.re) * *wk;
        }
        values.push(acc);
    }
    Ok(SampledFunction { grid: xs.iter().map(|&x| c(x, 0.0)).collect(), values, weights: None })
}

/// `|ψ̃|²ρ̃` on the last panel relative to its maximum.
pub fn kl_tail_estimate(coeffs: &SampledFunction, kl: &KlConfig) -> f64 {
    let d: Vec<f64> = coeffs.grid.iter().zip(&coeffs.values).map(|(k, u)| u.norm_sqr() * tilde_rho(k.re)).collect();
    let peak = d.iter().cloned().fold(0.0, f64::max);
    let last = d[d.len().saturating_sub(kl.k_order)..].iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        last / peak
    } else {
        0.0
    }
}

/// `|‖ψ‖² - ∫|ψ̃|²ρ̃ dk| / ‖ψ‖²`.
pub fn kl_parseval_gap(psi: &TestFunction, kl: &KlConfig, cfg: &QuadConfig) -> Result<f64> {
    let u = kl_forward(psi, kl, cfg)?;
    let w = u.weights.as_ref().expect("forward attaches weights");
    let s: f64 = u.grid.iter().zip(&u.values).zip(w).map(|((k, v), w)| v.norm_sqr() * tilde_rho(k.re) * w).sum();
    let norm = psi.l2_norm_sq(cfg)?;
    Ok((norm - s).abs() / norm)
}

/// Sup-norm error of the reconstructed `ψ` on `xs`.
pub fn kl_round_trip_error(psi: &TestFunction, xs: &[f64], kl: &KlConfig, cfg: &QuadConfig) -> Result<f64> {
    let back = kl_inverse(&kl_forward(psi, kl, cfg)?, xs, cfg)?;
    Ok(back.values.iter().zip(xs).map(|(v, &x)| (v - psi.eval(c(x, 0.0))).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadConfig {
        QuadConfig::with_tol(1e-16, 1e-13)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(5.0, 0.0)) - 24.0).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        let g = gamma(c(0.0, 1.0)).norm_sqr();
        assert!((g - PI / PI.sinh()).abs() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
        assert!(gamma(c(-2.0, 0.0)).re.is_infinite());
        let z = c(0.3, 40.0);
        assert!(rel_err(ln_gamma(z + 1.0).exp(), z * ln_gamma(z).exp(), 0.0) < 1e-12);
    }

    #[test]
    fn k_against_series() {
        let a = bessel_k(0.0, 1.0, &cfg()).unwrap();
        let b = bessel_k_series(c(1.0, 0.0), c(0.0, 1.0));
        assert!(rel_err(a, b, 0.0) < 1e-10, "{a} {b}");
        assert!(a.im.abs() < 1e-14);
    }

    #[test]
    fn k_decay_and_symmetry() {
        let v = bessel_k(3.0, 1.0, &cfg()).unwrap();
        assert!(v.norm() < (-(3.0f64.exp())).exp() * 10.0);
        let a = bessel_k(0.4, 1.0, &cfg()).unwrap();
        let b = bessel_k(0.4, -1.0, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn i_examples() {
        let nu = c(0.5, 0.0);
        let z: f64 = (-2.0f64).exp();
        let exact = (2.0 / (PI * z)).sqrt() * z.sinh();
        let v = bessel_i(-2.0, nu, &cfg()).unwrap();
        assert!(rel_err(v, c(exact, 0.0), 0.0) < 1e-10, "{v} {exact}");
        assert!(quasi_periodicity_residual(0.0, c(0.3, 0.0), &cfg()).unwrap() < 1e-10);
        assert!(wronskian_residual(0.2, c(0.3, 0.0), &cfg()).unwrap() < 1e-8);
        assert!(bessel_i(0.0, c(2.0, 0.0), &cfg()).is_err());
    }

    #[test]
    fn k_i_relations() {
        for (x, nu) in [(0.0, c(0.3, 0.0)), (1.0, c(0.0, 0.5)), (-3.0, c(0.7, 0.0))] {
            let r = k_to_i_relation_check(x, nu, &cfg()).unwrap();
            assert!(r < 1e-8, "x={x} ν={nu} {r}");
        }
    }

    #[test]
    fn classical_scattering() {
        assert!((tilde_s(0.7).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!((tilde_s(1e-4).unwrap() + 1.0).norm() < 1e-3);
        assert!(rel_err(tilde_s(0.7).unwrap(), tilde_s_closed(0.7), 0.0) < 1e-10);
        assert!(tilde_m(c(0.0, 0.0)).is_err());
        let k = 0.8;
        let m = tilde_m(c(k, 0.0)).unwrap().norm_sqr();
        assert!((1.0 / (2.0 * PI * m) - tilde_rho(k)).abs() < 1e-12 * tilde_rho(k));
    }

    #[test]
    fn ode_and_connection() {
        for (x, k) in [(-1.0, 0.5), (0.5, 1.5), (1.2, 0.3)] {
            assert!(ode_residual(x, k, 1e-3, &cfg()).unwrap() < 1e-5);
            assert!(connection_residual(x, k, &cfg()).unwrap() < 1e-6);
        }
    }

    #[test]
    fn jost_asymptotics() {
        let k = c(0.6, 0.0);
        let x = -12.0;
        let f = jost_tilde(x, k, 1.0, &cfg()).unwrap();
        assert!((f - (I * k * x).exp()).norm() < 1e-6);
    }

    #[test]
    fn classical_resolvent() {
        let k = c(0.3, 0.8);
        assert!(resolvent_tilde_residual(0.4, -0.7, k, &cfg()).unwrap() < 1e-5);
        let a = resolvent_tilde(0.4, -0.7, k, &cfg()).unwrap();
        let b = resolvent_tilde(-0.7, 0.4, k, &cfg()).unwrap();
        assert!(rel_err(a, b, 0.0) < 1e-14);
    }

    #[test]
    fn kl_routes_agree() {
        let psi = TestFunction::gaussian();
        for k in [0.5, 2.0] {
            let a = kl_forward_at(&psi, k, &cfg()).unwrap();
            let b = kl_forward_direct(&psi, k, &cfg()).unwrap();
            assert!((a - b).norm() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn kl_parseval_and_round_trip() {
        let kl = KlConfig::default();
        let psi = TestFunction::poly_gaussian(&[0.0, 1.0]);
        let gap = kl_parseval_gap(&psi, &kl, &cfg()).unwrap();
        assert!(gap < 1e-4, "{gap}");
        let g = TestFunction::gaussian();
        let xs = [-2.0, -1.0, 0.0, 1.0];
        let e = kl_round_trip_error(&g, &xs, &kl, &cfg()).unwrap();
        assert!(e < 1e-4, "{e}");
    }
}
