//! Resolvent kernels of `H₀ = U + U⁻¹` and `H = U + U⁻¹ + V`, the smoothed
//! Heaviside function `θ(x) = 1/(1 - e^{-2πx/b})`, and the resolvent
//! identity `∫R(x,y;λ)[(H-λ)g](y)dy = g(x)` as an executable check.

use crate::cmath::{c, exp_m1, rel_err, I};
use crate::contour_quadrature::{integrate, ContourRule, ContourSpec, QuadConfig};
use crate::error::{Error, Result};
use crate::params::{LatticeParams, SpectralPoint};
use crate::testfunctions::TestFunction;
use crate::wavefunctions::WaveContext;
use crate::C64;
use std::f64::consts::PI;

/// Below this separation the kernel is evaluated by the mean over a circle in `y`.
pub const DIAGONAL_THRESHOLD: f64 = 1e-3;
const DIAGONAL_RADIUS: f64 = 0.1;
const DIAGONAL_POINTS: usize = 16;

/// `θ(x) = 1/(1 - e^{-2πx/b})`.
pub fn theta_smooth(x: C64, params: &LatticeParams) -> Result<C64> {
    let d = -exp_m1(-2.0 * PI * x / params.b);
    if d.norm() < 1e-12 {
        return Err(Error::Singular(format!("theta has a pole at x = {x}")));
    }
    Ok(1.0 / d)
}

/// `sinh(z)/z`.
fn sinhc(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 / 6.0 * (1.0 + z2 / 20.0)
    } else {
        z.sinh() / z
    }
}

/// `sin(z)/z`.
fn sinc(z: C64) -> C64 {
    sinhc(I * z)
}

fn check_point(point: &SpectralPoint, params: &LatticeParams) -> Result<C64> {
    let k = point.k;
    if !(k.im > 0.0 && k.im <= params.abs_omega() * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("resolvent needs 0 < Im k <= |ω|, got k = {k} (λ = {})", point.lambda)));
    }
    Ok(k)
}

/// The free kernel
/// `R₀(x;λ) = ω/sinh(2πbk) [e^{-2πikx}/(1 - e^{2πx/b}) + e^{2πikx}/(1 - e^{-2πx/b})]`.
///
/// Written as `sinc(vx/b) / (2πb sinhc(v) sinhc(πx/b))` with `v = 2πbk - iπ`,
/// which is regular at `x = 0` and at `λ = -2`.
pub fn r0_kernel(x: C64, point: &SpectralPoint, params: &LatticeParams) -> Result<C64> {
    let k = check_point(point, params)?;
    Ok(r0_unchecked(x, k, params.b))
}

fn r0_unchecked(x: C64, k: C64, b: f64) -> C64 {
    let v = 2.0 * PI * b * k - I * PI;
    let s = x / b;
    sinc(v * s) / (2.0 * PI * b * sinhc(v) * sinhc(PI * s))
}

/// `R₀` straight from the two-term definition, for comparison away from its removable singularities.
pub fn r0_kernel_direct(x: C64, point: &SpectralPoint, params: &LatticeParams) -> Result<C64> {
    let k = check_point(point, params)?;
    let u = 2.0 * PI * x / params.b;
    let e = 2.0 * PI * I * k * x;
    let sum = (-e).exp() / (-exp_m1(u)) + e.exp() / (-exp_m1(-u));
    Ok(params.omega / (2.0 * PI * params.b * k).sinh() * sum)
}

/// `φ(z,k)` and `N(z) = φ(z-2ω) - φ(z+2ω) - 2sinh(2πk/b)φ(z)` at each `z`;
/// `N` is `-4sinh(2πk/b)M(-k)f₋(z,k)`. The shifts by `±2ω` become the
/// multiplier `2(sinh(2πp/b) - sinh(2πk/b))` on `ĥφ`, so both share one
/// contour.
fn kernel_parts(ctx: &WaveContext, zs: &[C64], k: C64) -> Result<Vec<(C64, C64)>> {
    let b = ctx.params.b;
    let sk = (2.0 * PI * k / b).sinh();
    let mut out = vec![(c(0.0, 0.0), c(0.0, 0.0)); zs.len()];
    for (nodes, idx) in ctx.node_groups(zs, k)? {
        let n = nodes.with_multiplier(|p| 2.0 * ((2.0 * PI * p / b).sinh() - sk));
        for j in idx {
            out[j] = (nodes.phi(zs[j]), n.phi(zs[j]));
        }
    }
    Ok(out)
}

/// The shift form of [`kernel_parts`], for cross-checks.
#[cfg(test)]
fn kernel_parts_shifted(ctx: &WaveContext, zs: &[C64], k: C64) -> Result<Vec<(C64, C64)>> {
    let w2 = 2.0 * ctx.params.omega;
    let mut pts = Vec::with_capacity(3 * zs.len());
    for &z in zs {
        pts.extend_from_slice(&[z - w2, z + w2, z]);
    }
    let v = ctx.phi_many(&pts, k)?;
    let s = 2.0 * (2.0 * PI * k / ctx.params.b).sinh();
    Ok(v.chunks(3).map(|t| (t[2], t[0] - t[1] - s * t[2])).collect())
}

fn kernel_from_parts(x: C64, y: C64, px: (C64, C64), py: (C64, C64), params: &LatticeParams) -> C64 {
    let u = 2.0 * PI * (x - y) / params.b;
    let t1 = -1.0 / exp_m1(u);
    let t2 = -1.0 / exp_m1(-u);
    -params.omega * (px.1 * py.0 * t1 + py.1 * px.0 * t2)
}

/// Evaluator of `R(x,y;λ)` for one spectral point.
///
/// The kernel is assembled from `φ` and the combination `N` above, so it
/// needs no division by `M(k)` or `sinh(2πbk)` and stays finite at
/// `λ = -2` even where those vanish.
pub struct Resolvent<'a> {
    ctx: &'a WaveContext,
    k: C64,
}

impl<'a> Resolvent<'a> {
    pub fn new(ctx: &'a WaveContext, point: &SpectralPoint) -> Result<Self> {
        let k = check_point(point, &ctx.params)?;
        Ok(Self { ctx, k })
    }

    pub fn k(&self) -> C64 {
        self.k
    }

    /// `R(x,y;λ)`.
    pub fn kernel(&self, x: C64, y: C64) -> Result<C64> {
        Ok(self.row(x, &[y])?[0])
    }

    /// `R(x,y_j;λ)` for many `y_j` at a fixed `x`.
    pub fn row(&self, x: C64, ys: &[C64]) -> Result<Vec<C64>> {
        let parts = kernel_parts(self.ctx, ys, self.k)?;
        self.row_from_parts(x, ys, &parts)
    }

    /// As [`Self::row`], with `(φ, N)` at the `y_j` already known.
    fn row_from_parts(&self, x: C64, ys: &[C64], yparts: &[(C64, C64)]) -> Result<Vec<C64>> {
        let mut pts = vec![x];
        let mut diag = Vec::new();
        for (j, &y) in ys.iter().enumerate() {
            if (x - y).norm() < DIAGONAL_THRESHOLD {
                diag.push(j);
                for m in 0..DIAGONAL_POINTS {
                    let t = 2.0 * PI * (m as f64 + 0.5) / DIAGONAL_POINTS as f64;
                    pts.push(y + C64::from_polar(DIAGONAL_RADIUS, t));
                }
            }
        }
        let extra = kernel_parts(self.ctx, &pts, self.k)?;
        let p = &self.ctx.params;
        let px = extra[0];
        let mut out: Vec<C64> = ys.iter().zip(yparts).map(|(&y, &py)| kernel_from_parts(x, y, px, py, p)).collect();
        for (n, &j) in diag.iter().enumerate() {
            let base = 1 + n * DIAGONAL_POINTS;
            let acc: C64 =
                (0..DIAGONAL_POINTS).map(|m| kernel_from_parts(x, pts[base + m], px, extra[base + m], p)).sum();
            out[j] = acc / DIAGONAL_POINTS as f64;
        }
        Ok(out)
    }

    /// `R(x,y;λ) = ω/(sinh(2πbk)M(k)) [f₋(x)φ(y)θ(y-x) + f₋(y)φ(x)θ(x-y)]`
    /// with explicit Jost solutions; undefined where `sinh(2πbk) = 0`.
    pub fn kernel_jost_form(&self, x: C64, y: C64) -> Result<C64> {
        let (ctx, k, p) = (self.ctx, self.k, &self.ctx.params);
        let den = (2.0 * PI * p.b * k).sinh() * ctx.coeff_m(k)?;
        if den.norm() < 1e-12 {
            return Err(Error::Singular(format!("sinh(2πbk)M(k) vanishes at k = {k}")));
        }
        let f = ctx.jost_many(&[x, y], k, -1.0)?;
        let ph = ctx.phi_many(&[x, y], k)?;
        let u = 2.0 * PI * (x - y) / p.b;
        let t1 = -1.0 / exp_m1(u);
        let t2 = -1.0 / exp_m1(-u);
        Ok(p.omega / den * (f[0] * ph[1] * t1 + f[1] * ph[0] * t2))
    }

    /// The single-fraction form
    /// `ω [f₋(x)φ(y)e^{2πiω(x-y)} - f₋(y)φ(x)e^{-2πiω(x-y)}] / (2sinh(2πiω(x-y)) sinh(2πbk) M(k))`.
    pub fn kernel_fused_form(&self, x: C64, y: C64) -> Result<C64> {
        let (ctx, k, p) = (self.ctx, self.k, &self.ctx.params);
        let den = (2.0 * PI * p.b * k).sinh() * ctx.coeff_m(k)?;
        let f = ctx.jost_many(&[x, y], k, -1.0)?;
        let ph = ctx.phi_many(&[x, y], k)?;
        let a = 2.0 * PI * I * p.omega * (x - y);
        let num = f[0] * ph[1] * a.exp() - f[1] * ph[0] * (-a).exp();
        Ok(p.omega * num / (2.0 * a.sinh() * den))
    }

    /// Relative residual of `R(x+2ω',y) + R(x-2ω',y) + (e^{2πbx} - λ)R(x,y) = 0` for `x ≠ y`.
    pub fn homogeneous_residual(&self, x: C64, y: C64) -> Result<f64> {
        let p = &self.ctx.params;
        let s = 2.0 * p.omega_prime;
        let lam = p.lambda_of(self.k);
        let a = self.kernel(x + s, y)?;
        let b = self.kernel(x - s, y)?;
        let r = self.kernel(x, y)?;
        let v = ((2.0 * PI * p.b * x).exp() - lam) * r;
        let scale = a.norm().max(b.norm()).max(v.norm());
        Ok((a + b + v).norm() / scale)
    }

    /// `sup_x |∫R(x,y;λ)[(H-λ)g](y)dy - g(x)|` over the probe points.
    pub fn identity_residual(&self, g: &TestFunction, xprobe: &[f64]) -> Result<f64> {
        let p = &self.ctx.params;
        let h = g.apply_h_minus(p, p.lambda_of(self.k));
        let rule = y_rule(&h, xprobe);
        let hv: Vec<C64> = rule.nodes.iter().map(|y| h.eval(*y)).collect();
        let yparts = kernel_parts(self.ctx, &rule.nodes, self.k)?;
        let mut worst: f64 = 0.0;
        for &x in xprobe {
            let row = self.row_from_parts(c(x, 0.0), &rule.nodes, &yparts)?;
            let v: C64 = row.iter().zip(&hv).zip(&rule.weights).map(|((r, h), w)| r * h * w).sum();
            worst = worst.max((v - g.eval(c(x, 0.0))).norm());
        }
        Ok(worst)
    }
}

/// Fixed rule on the real interval carrying `h`, with panels short enough for the kernel.
fn y_rule(h: &TestFunction, xprobe: &[f64]) -> ContourRule {
    let (mut lo, mut hi) = h.support(5.5);
    for &x in xprobe {
        lo = lo.min(x - 1.0);
        hi = hi.max(x + 1.0);
    }
    ContourSpec::polyline("resolvent-y", &[c(lo, 0.0), c(hi, 0.0)]).rule(20, |_| 0.25)
}

/// `R(x,y;λ)` for a single pair.
pub fn r_kernel(x: C64, y: C64, point: &SpectralPoint, ctx: &WaveContext) -> Result<C64> {
    Resolvent::new(ctx, point)?.kernel(x, y)
}

/// `sup_x |∫R(x,y;λ)[(H-λ)g](y)dy - g(x)|`.
pub fn resolvent_identity_check(
    g: &TestFunction,
    point: &SpectralPoint,
    ctx: &WaveContext,
    xprobe: &[f64],
) -> Result<f64> {
    Resolvent::new(ctx, point)?.identity_residual(g, xprobe)
}

/// `sup_x |∫R₀(x-y;λ)[(H₀-λ)g](y)dy - g(x)|`.
pub fn free_identity_check(
    g: &TestFunction,
    point: &SpectralPoint,
    params: &LatticeParams,
    xprobe: &[f64],
    cfg: &QuadConfig,
) -> Result<f64> {
    let k = check_point(point, params)?;
    let h = g.apply_h0(params).add(&g.scale(-point.lambda));
    let (lo, hi) = h.support(7.0);
    let mut worst: f64 = 0.0;
    for &x in xprobe {
        let line = ContourSpec::polyline("free-y", &[c(lo.min(x - 1.0), 0.0), c(x, 0.0), c(hi.max(x + 1.0), 0.0)]);
        let v = integrate(|y| r0_unchecked(c(x, 0.0) - y, k, params.b) * h.eval(y), &line, cfg)?.value;
        worst = worst.max((v - g.eval(c(x, 0.0))).norm());
    }
    Ok(worst)
}

/// `∫g(x)[θ(x+2ω'-iε) - θ(x+2ω'+iε)]dx`, which tends to `2ω'g(0)` as `ε → 0`.
pub fn plemelj_jump(g: &TestFunction, eps: f64, params: &LatticeParams, cfg: &QuadConfig) -> Result<C64> {
    let s = 2.0 * params.omega_prime;
    let (lo, hi) = g.support(7.0);
    let line = ContourSpec::polyline("plemelj", &[c(lo, 0.0), c(0.0, 0.0), c(hi, 0.0)]);
    let f = |x: C64| {
        let a = theta_smooth(x + s - c(0.0, eps), params).unwrap_or(c(f64::NAN, 0.0));
        let b = theta_smooth(x + s + c(0.0, eps), params).unwrap_or(c(f64::NAN, 0.0));
        g.eval(x) * (a - b)
    };
    Ok(integrate(f, &line, cfg)?.value)
}

/// Fits `C` in `|F(d)| ≤ C e^{-rate·d}` at `d = fit_at` and returns the
/// largest ratio `|F(d)| e^{rate·d} / C` over `check_at`.
pub fn envelope_ratio(mut f: impl FnMut(f64) -> Result<C64>, rate: f64, fit_at: f64, check_at: &[f64]) -> Result<f64> {
    let c0 = f(fit_at)?.norm() * (rate * fit_at).exp();
    let mut worst: f64 = 0.0;
    for &d in check_at {
        worst = worst.max(f(d)?.norm() * (rate * d).exp() / c0);
    }
    Ok(worst)
}

/// Relative difference between the kernel and its transpose.
pub fn symmetry_residual(res: &Resolvent, x: C64, y: C64) -> Result<f64> {
    Ok(rel_err(res.kernel(x, y)?, res.kernel(y, x)?, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(b: f64) -> WaveContext {
        WaveContext::new(LatticeParams::new(b).unwrap())
    }

    #[test]
    fn theta_examples() {
        let p = LatticeParams::new(1.0).unwrap();
        let s = theta_smooth(c(0.37, 0.0), &p).unwrap() + theta_smooth(c(-0.37, 0.0), &p).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
        assert!((theta_smooth(c(5.0, 0.0), &p).unwrap() - 1.0).norm() < 1e-13);
        assert!(theta_smooth(c(-5.0, 0.0), &p).unwrap().norm() < 1e-13);
        let x = std::f64::consts::LN_2 / (2.0 * PI);
        assert!((theta_smooth(c(x, 0.0), &p).unwrap() - 2.0).norm() < 1e-14);
        assert!(theta_smooth(c(0.0, 0.0), &p).is_err());
    }

    #[test]
    fn free_kernel_forms_agree() {
        let p = LatticeParams::new(1.2).unwrap();
        let pt = p.spectral_point(c(0.2, 0.3)).unwrap();
        for x in [0.6, -1.3, 2.5] {
            let a = r0_kernel(c(x, 0.0), &pt, &p).unwrap();
            let d = r0_kernel_direct(c(x, 0.0), &pt, &p).unwrap();
            assert!(rel_err(a, d, 0.0) < 1e-12, "x={x} {a} {d}");
        }
        let a = r0_kernel(c(0.6, 0.0), &pt, &p).unwrap();
        let b = r0_kernel(c(-0.6, 0.0), &pt, &p).unwrap();
        assert!(rel_err(a, b, 0.0) < 1e-14);
        let near = r0_kernel(c(1e-7, 0.0), &pt, &p).unwrap();
        let at = r0_kernel(c(0.0, 0.0), &pt, &p).unwrap();
        assert!(rel_err(near, at, 0.0) < 1e-10);
    }

    #[test]
    fn free_identity() {
        let p = LatticeParams::new(1.0).unwrap();
        let cfg = QuadConfig::with_tol(1e-13, 1e-11);
        for lam in [c(-2.0, 0.0), c(2.0, 1.0)] {
            let pt = p.k_from_lambda(lam).unwrap();
            let r = free_identity_check(&TestFunction::gaussian(), &pt, &p, &[-1.0, 0.0, 1.0], &cfg).unwrap();
            assert!(r < 1e-8, "λ={lam} {r}");
        }
    }

    #[test]
    fn kernel_forms_agree() {
        let w = setup(1.0);
        let pt = w.params.spectral_point(c(0.2, 0.3)).unwrap();
        let r = Resolvent::new(&w, &pt).unwrap();
        let (x, y) = (c(0.3, 0.0), c(-0.5, 0.0));
        let a = r.kernel(x, y).unwrap();
        let b = r.kernel_jost_form(x, y).unwrap();
        let f = r.kernel_fused_form(x, y).unwrap();
        assert!(rel_err(a, b, 0.0) < 1e-9, "{a} {b}");
        assert!(rel_err(b, f, 0.0) < 1e-9, "{b} {f}");
    }

    #[test]
    fn multiplier_matches_shifts() {
        let w = setup(1.3);
        let k = c(0.1, 0.25);
        let zs = [c(-2.0, 0.0), c(0.3, 0.0), c(1.7, 0.0), c(3.2, 0.0)];
        let a = kernel_parts(&w, &zs, k).unwrap();
        let b = kernel_parts_shifted(&w, &zs, k).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!(rel_err(u.0, v.0, 0.0) < 1e-10);
            assert!(rel_err(u.1, v.1, 0.0) < 1e-8, "{} {}", u.1, v.1);
        }
    }

    #[test]
    fn symmetry_and_conjugation() {
        let w = setup(1.0);
        let pt = w.params.k_from_lambda(c(-2.0, 0.0)).unwrap();
        let r = Resolvent::new(&w, &pt).unwrap();
        assert!(symmetry_residual(&r, c(0.3, 0.0), c(-0.5, 0.0)).unwrap() < 1e-10);
        let lam = c(2.0, 1.0);
        let r1 = Resolvent::new(&w, &w.params.k_from_lambda(lam).unwrap()).unwrap();
        let r2 = Resolvent::new(&w, &w.params.k_from_lambda(lam.conj()).unwrap()).unwrap();
        let a = r1.kernel(c(0.3, 0.0), c(-0.5, 0.0)).unwrap();
        let b = r2.kernel(c(0.3, 0.0), c(-0.5, 0.0)).unwrap();
        assert!(rel_err(a.conj(), b, 0.0) < 1e-10, "{a} {b}");
    }

    #[test]
    fn diagonal_is_continuous() {
        let w = setup(1.0);
        let pt = w.params.spectral_point(c(0.0, 0.3)).unwrap();
        let r = Resolvent::new(&w, &pt).unwrap();
        let x = c(0.2, 0.0);
        let on = r.kernel(x, x).unwrap();
        let off = r.kernel(x, x + 2e-3).unwrap();
        assert!(rel_err(on, off, 0.0) < 1e-2, "{on} {off}");
        let near = r.kernel(x, x + 5e-4).unwrap();
        assert!(rel_err(on, near, 0.0) < 1e-2);
    }

    #[test]
    fn homogeneous_equation() {
        let w = setup(1.0);
        let pt = w.params.spectral_point(c(0.0, 0.3)).unwrap();
        let r = Resolvent::new(&w, &pt).unwrap();
        assert!(r.homogeneous_residual(c(0.4, 0.0), c(-0.7, 0.0)).unwrap() < 1e-5);
    }

    #[test]
    fn integrated_identity() {
        let w = setup(1.0);
        let cases = [(TestFunction::gaussian(), c(-2.0, 0.0)), (TestFunction::poly_gaussian(&[0.0, 1.0]), c(2.0, 1.0))];
        for (g, lam) in cases {
            let pt = w.params.k_from_lambda(lam).unwrap();
            let r = resolvent_identity_check(&g, &pt, &w, &[-1.0, 0.0, 1.0]).unwrap();
            assert!(r < 1e-6, "λ={lam} {r}");
        }
    }

    #[test]
    fn rejects_real_spectrum() {
        let w = setup(1.0);
        let pt = SpectralPoint { k: c(0.3, 0.0), lambda: w.params.lambda_of(c(0.3, 0.0)) };
        assert!(Resolvent::new(&w, &pt).is_err());
        assert!(w.params.k_from_lambda(c(3.0, 0.0)).is_err());
    }

    #[test]
    fn plemelj_limit() {
        let p = LatticeParams::new(1.0).unwrap();
        let g = TestFunction::gaussian();
        let cfg = QuadConfig::with_tol(1e-12, 1e-10);
        let target = 2.0 * p.omega_prime;
        let e1 = (plemelj_jump(&g, 1e-2, &p, &cfg).unwrap() - target).norm();
        let e2 = (plemelj_jump(&g, 1e-3, &p, &cfg).unwrap() - target).norm();
        assert!(e2 < 0.2 * e1 && e2 < 5e-3, "{e1} {e2}");
    }
}
