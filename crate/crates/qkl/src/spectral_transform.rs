//! The q-deformed Kontorovich-Lebedev transform
//! `(𝒰ψ)(k) = ∫ψ(x)φ(x,k)dx`, its inverse
//! `ψ(x) = ∫₀^∞ (𝒰ψ)(k)φ(x,k)ρ(k)dk`, and the scattering coefficient
//! `S(k) = M(-k)/M(k)`.
//!
//! The forward transform is computed on the momentum side: exchanging the
//! order of integration gives `(𝒰ψ)(k) = ∫ĥφ(p,k)ψ̂(-p)dp` over the
//! contour of `φ`, with `ψ̂` known in closed form.

use crate::cmath::{c, rel_err, I};
use crate::contour_quadrature::{gauss_legendre, ContourSpec, QuadConfig};
use crate::error::{Error, Result};
use crate::params::LatticeParams;
use crate::qdilog::gamma_ratio;
use crate::testfunctions::TestFunction;
use crate::wavefunctions::{transform_contour, PhiNodes, WaveContext};
use crate::C64;
use std::f64::consts::PI;

/// Values of a complex function on a grid, with optional quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: Vec<C64>,
    pub values: Vec<C64>,
    /// Quadrature weights when the grid is a rule for `∫ dk`.
    pub weights: Option<Vec<f64>>,
}

impl SampledFunction {
    pub fn new(grid: Vec<C64>, values: Vec<C64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, weights: None })
    }

    pub fn on_real_grid(xs: &[f64], f: impl Fn(f64) -> C64) -> Self {
        Self {
            grid: xs.iter().map(|&x| c(x, 0.0)).collect(),
            values: xs.iter().map(|&x| f(x)).collect(),
            weights: None,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn is_real_grid(&self) -> bool {
        self.grid.iter().all(|z| z.im == 0.0)
    }

    /// `max_j |f(x_j) - g(x_j)|`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `ρ(k) = 4 sinh(2πbk) sinh(2πk/b)`.
pub fn rho(k: f64, params: &LatticeParams) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("spectral density needs k > 0, got {k}")));
    }
    Ok(rho_unchecked(k, params.b))
}

fn rho_unchecked(k: f64, b: f64) -> f64 {
    4.0 * (2.0 * PI * b * k).sinh() * (2.0 * PI * k / b).sinh()
}

/// `ρ(k)` computed as `1/(M(k)M(-k))`.
pub fn rho_from_m(k: f64, ctx: &WaveContext) -> Result<C64> {
    let kk = c(k, 0.0);
    Ok((-(ctx.ln_coeff_m(kk)? + ctx.ln_coeff_m(-kk)?)).exp())
}

/// Discretization of the spectral integral `∫₀^{k_max} dk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformConfig {
    pub k_max: f64,
    pub k_panel: f64,
    pub k_order: usize,
    /// Largest `|x|` at which `φ(x,k)` is reconstructed.
    pub x_range: f64,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self { k_max: 3.5, k_panel: 0.5, k_order: 16, x_range: 2.0 }
    }
}

impl TransformConfig {
    /// Gauss-Legendre nodes and weights on `[0, k_max]`.
    pub fn k_rule(&self) -> (Vec<f64>, Vec<f64>) {
        let g = gauss_legendre(self.k_order);
        let n = (self.k_max / self.k_panel).ceil().max(1.0) as usize;
        let h = self.k_max / n as f64;
        let mut nodes = Vec::with_capacity(n * self.k_order);
        let mut weights = Vec::with_capacity(n * self.k_order);
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

fn x_scale(psi: &TestFunction) -> f64 {
    let (lo, hi) = psi.support(0.0);
    lo.abs().max(hi.abs()) + 1.0
}

/// `(𝒰ψ)(k)` from the samples of `ĥφ(·,k)` on the contour.
fn forward_on(nodes: &PhiNodes, psi: &TestFunction) -> C64 {
    let f = psi.fourier();
    nodes.pair(|p| f.eval(-p))
}

/// The transform pair on a fixed spectral grid, with `ĥφ(·,k)` sampled once per grid point.
#[derive(Debug, Clone)]
pub struct SpectralTransform {
    pub ctx: WaveContext,
    pub config: TransformConfig,
    pub knodes: Vec<f64>,
    pub kweights: Vec<f64>,
    samples: Vec<PhiNodes>,
    scale: f64,
}

impl SpectralTransform {
    /// Prepares the grid; `x_scale` bounds `|x|` on the support of the
    /// functions to be transformed.
    pub fn new(ctx: WaveContext, config: TransformConfig, x_scale: f64) -> Result<Self> {
        let (knodes, kweights) = config.k_rule();
        let scale = x_scale.max(config.x_range);
        let samples = knodes.iter().map(|&k| sample_at(&ctx, k, scale)).collect::<Result<Vec<_>>>()?;
        Ok(Self { ctx, config, knodes, kweights, samples, scale })
    }

    /// Samples at arbitrary spectral points; the weights are zero, so only
    /// pointwise forward values are meaningful.
    pub fn at_points(ctx: WaveContext, ks: &[f64], x_scale: f64) -> Result<Self> {
        let config = TransformConfig::default();
        let scale = x_scale.max(config.x_range);
        let samples = ks.iter().map(|&k| sample_at(&ctx, k, scale)).collect::<Result<Vec<_>>>()?;
        Ok(Self { ctx, config, knodes: ks.to_vec(), kweights: vec![0.0; ks.len()], samples, scale })
    }

    /// A grid suited to the given test functions and their images under `H`.
    pub fn for_functions(ctx: WaveContext, config: TransformConfig, psis: &[&TestFunction]) -> Result<Self> {
        let s = psis.iter().map(|p| x_scale(&p.apply_h(&ctx.params))).fold(0.0, f64::max);
        Self::new(ctx, config, s)
    }

    fn check_scale(&self, psi: &TestFunction) -> Result<()> {
        let s = x_scale(psi);
        if s > self.scale * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "test function extends to |x| = {s}, beyond the prepared range {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// `(𝒰ψ)(k_j)` on the spectral grid, carrying its quadrature weights.
    pub fn forward(&self, psi: &TestFunction) -> Result<SampledFunction> {
        self.check_scale(psi)?;
        let values = self.samples.iter().map(|n| forward_on(n, psi)).collect();
        Ok(SampledFunction {
            grid: self.knodes.iter().map(|&k| c(k, 0.0)).collect(),
            values,
            weights: Some(self.kweights.clone()),
        })
    }

    /// `∫₀^{k_max} (𝒰ψ)(k)φ(x,k)ρ(k)dk` at each `x`.
    pub fn inverse(&self, coeffs: &SampledFunction, xs: &[f64]) -> Result<SampledFunction> {
        if coeffs.len() != self.knodes.len() || coeffs.weights.as_deref() != Some(&self.kweights[..]) {
            return Err(Error::InvalidParameter("coefficients are not sampled on this spectral grid".into()));
        }
        if let Some(x) = xs.iter().find(|x| x.abs() > self.config.x_range * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!("x = {x} outside the reconstruction range")));
        }
        let b = self.ctx.params.b;
        let values = xs
            .iter()
            .map(|&x| {
                self.samples
                    .iter()
                    .zip(&self.knodes)
                    .zip(&self.kweights)
                    .zip(&coeffs.values)
                    .map(|(((n, &k), &w), &u)| u * n.phi(c(x, 0.0)) * rho_unchecked(k, b) * w)
                    .sum()
            })
            .collect();
        Ok(SampledFunction { grid: xs.iter().map(|&x| c(x, 0.0)).collect(), values, weights: None })
    }

    /// `∫₀^{k_max} |(𝒰ψ)(k)|² ρ(k) dk`.
    pub fn spectral_norm_sq(&self, coeffs: &SampledFunction) -> f64 {
        let b = self.ctx.params.b;
        coeffs
            .values
            .iter()
            .zip(&self.knodes)
            .zip(&self.kweights)
            .map(|((u, &k), &w)| u.norm_sqr() * rho_unchecked(k, b) * w)
            .sum()
    }

    /// `|‖ψ‖² - ∫₀^∞|(𝒰ψ)(k)|²ρ(k)dk| / ‖ψ‖²`.
    pub fn parseval_gap(&self, psi: &TestFunction) -> Result<f64> {
        let norm = psi.l2_norm_sq(&QuadConfig::with_tol(1e-15, 1e-13))?;
        let u = self.forward(psi)?;
        Ok((norm - self.spectral_norm_sq(&u)).abs() / norm)
    }

    /// Sup-norm error of `𝒰⁻¹𝒰ψ` against `ψ` on the given points.
    pub fn round_trip_error(&self, psi: &TestFunction, xs: &[f64]) -> Result<f64> {
        let back = self.inverse(&self.forward(psi)?, xs)?;
        let exact = SampledFunction::on_real_grid(xs, |x| psi.eval(c(x, 0.0)));
        Ok(back.sup_distance(&exact))
    }

    /// `max_k |(𝒰Hψ)(k) - 2cosh(2πbk)(𝒰ψ)(k)| / max_k |2cosh(2πbk)(𝒰ψ)(k)|` over the grid.
    pub fn diagonalization_gap(&self, psi: &TestFunction) -> Result<f64> {
        let p = &self.ctx.params;
        let u = self.forward(psi)?;
        let hu = self.forward(&psi.apply_h(p))?;
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for ((&k, a), b) in self.knodes.iter().zip(&u.values).zip(&hu.values) {
            let rhs = p.lambda_of(c(k, 0.0)) * a;
            diff = diff.max((b - rhs).norm());
            scale = scale.max(rhs.norm());
        }
        Ok(diff / scale)
    }

    /// Weight of the spectral tail: `|𝒰ψ|²ρ` on the last panel relative to its maximum.
    pub fn tail_estimate(&self, coeffs: &SampledFunction) -> f64 {
        let b = self.ctx.params.b;
        let dens: Vec<f64> =
            coeffs.values.iter().zip(&self.knodes).map(|(u, &k)| u.norm_sqr() * rho_unchecked(k, b)).collect();
        let peak = dens.iter().cloned().fold(0.0, f64::max);
        let last = dens[dens.len().saturating_sub(self.config.k_order)..].iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            last / peak
        } else {
            0.0
        }
    }
}

fn sample_at(ctx: &WaveContext, k: f64, scale: f64) -> Result<PhiNodes> {
    let kk = c(k, 0.0);
    let contour = transform_contour(kk, &ctx.params, scale);
    ctx.phi_nodes(kk, &contour, scale)
}

/// `(𝒰ψ)(k)` on a list of spectral points.
pub fn forward(psi: &TestFunction, kgrid: &[f64], ctx: &WaveContext) -> Result<SampledFunction> {
    let s = x_scale(psi);
    let values = kgrid.iter().map(|&k| Ok(forward_on(&sample_at(ctx, k, s)?, psi))).collect::<Result<Vec<_>>>()?;
    SampledFunction::new(kgrid.iter().map(|&k| c(k, 0.0)).collect(), values)
}

/// `(𝒰ψ)(k)` by quadrature in `x` against `φ(x,k)`, for cross-checks.
pub fn forward_direct(psi: &TestFunction, k: f64, ctx: &WaveContext) -> Result<C64> {
    let (lo, hi) = psi.support(6.0);
    let rule = ContourSpec::polyline("transform-x", &[c(lo, 0.0), c(hi, 0.0)]).rule(20, |_| 0.25);
    let phi = ctx.phi_many(&rule.nodes, c(k, 0.0))?;
    Ok(rule.nodes.iter().zip(&rule.weights).zip(&phi).map(|((x, w), f)| w * psi.eval(*x) * f).sum())
}

/// `max_k |(𝒰Hψ)(k) - 2cosh(2πbk)(𝒰ψ)(k)| / max_k |2cosh(2πbk)(𝒰ψ)(k)|`.
pub fn diagonalization_gap(psi: &TestFunction, kprobe: &[f64], ctx: &WaveContext) -> Result<f64> {
    let s = x_scale(&psi.apply_h(&ctx.params));
    SpectralTransform::at_points(*ctx, kprobe, s)?.diagonalization_gap(psi)
}

/// The `x` extent used to size contours for `ψ` and `Hψ`.
pub fn transform_scale(psi: &TestFunction, params: &LatticeParams) -> f64 {
    x_scale(&psi.apply_h(params)).max(x_scale(psi))
}

/// `S(k) = e^{-4πiω''k} γ(-2k-ω'')/γ(2k-ω'')`.
pub fn scattering_s(k: f64, params: &LatticeParams, k_exclusion: f64) -> Result<C64> {
    if k.abs() <= k_exclusion {
        return Err(Error::Degenerate(format!("|k| = {} inside the exclusion radius {k_exclusion}", k.abs())));
    }
    let kk = c(k, 0.0);
    let w = params.omega_dprime;
    Ok((-4.0 * PI * I * w * kk).exp() * gamma_ratio(-2.0 * kk - w, 2.0 * kk - w, params)?)
}

/// `S(k)` as `M(-k)/M(k)`.
pub fn scattering_s_from_m(k: f64, ctx: &WaveContext) -> Result<C64> {
    let kk = c(k, 0.0);
    Ok((ctx.ln_coeff_m(-kk)? - ctx.ln_coeff_m(kk)?).exp())
}

/// `|φ(x,k)/M(k) - e^{2πikx} - S(k)e^{-2πikx}|`.
pub fn phi_plus_asymptotic_gap(x: f64, k: f64, ctx: &WaveContext) -> Result<f64> {
    let kk = c(k, 0.0);
    let xx = c(x, 0.0);
    let lhs = ctx.phi(xx, kk)? / ctx.coeff_m(kk)?;
    let s = scattering_s(k, &ctx.params, ctx.k_exclusion)?;
    let e = (2.0 * PI * I * kk * xx).exp();
    Ok((lhs - e - s / e).norm())
}

/// Relative difference of the two expressions for `S(k)`.
pub fn scattering_consistency(k: f64, ctx: &WaveContext) -> Result<f64> {
    Ok(rel_err(scattering_s(k, &ctx.params, ctx.k_exclusion)?, scattering_s_from_m(k, ctx)?, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(b: f64) -> WaveContext {
        WaveContext::new(LatticeParams::new(b).unwrap())
    }

    #[test]
    fn rho_examples() {
        let p = LatticeParams::new(1.0).unwrap();
        let v = rho(0.5, &p).unwrap();
        assert!((v - 4.0 * PI.sinh().powi(2)).abs() < 1e-10 * v);
        let r = rho(1e-3, &p).unwrap() / (16.0 * PI * PI * 1e-6);
        assert!((r - 1.0).abs() < 1e-3);
        assert!(rho(0.0, &p).is_err());
        let w = ctx(1.2);
        let m = rho_from_m(0.3, &w).unwrap();
        assert!(rel_err(m, c(rho(0.3, &w.params).unwrap(), 0.0), 0.0) < 1e-8);
    }

    #[test]
    fn fourier_route_matches_x_quadrature() {
        let w = ctx(1.0);
        let psi = TestFunction::poly_gaussian(&[1.0, 1.0]);
        for k in [0.15, 0.6] {
            let a = forward(&psi, &[k], &w).unwrap().values[0];
            let d = forward_direct(&psi, k, &w).unwrap();
            assert!((a - d).norm() < 1e-9 * a.norm().max(1e-3), "k={k} {a} {d}");
        }
    }

    #[test]
    fn forward_is_real_linear_and_decays() {
        let w = ctx(1.0);
        let g = TestFunction::gaussian();
        let h = TestFunction::poly_gaussian(&[0.0, 1.0]);
        let ks = [0.2, 2.0];
        let a = forward(&g, &ks, &w).unwrap();
        assert!(a.values[1].norm() < 1e-3 * a.values[0].norm());
        assert!(a.values.iter().all(|v| v.im.abs() < 1e-10 * a.values[0].norm()));
        let b = forward(&h, &ks, &w).unwrap();
        let s = forward(&g.add(&h), &ks, &w).unwrap();
        for j in 0..2 {
            assert!((s.values[j] - a.values[j] - b.values[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn scattering_examples() {
        let w = ctx(1.0);
        for k in [0.1, 0.4, 1.0] {
            let s = scattering_s(k, &w.params, w.k_exclusion).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-10);
            assert!(scattering_consistency(k, &w).unwrap() < 1e-10);
        }
        let prod = scattering_s(0.3, &w.params, 0.0).unwrap() * scattering_s(-0.3, &w.params, 0.0).unwrap();
        assert!((prod - 1.0).norm() < 1e-12);
        let s1 = scattering_s(1e-2, &w.params, 0.0).unwrap();
        let s2 = scattering_s(5e-3, &w.params, 0.0).unwrap();
        assert!((s2 + 1.0).norm() < (s1 + 1.0).norm() && (s1 + 1.0).norm() < 0.05);
    }

    #[test]
    fn phi_plus_asymptotics() {
        let w = ctx(1.0);
        assert!(phi_plus_asymptotic_gap(-4.0, 0.3, &w).unwrap() < 1e-3);
    }

    #[test]
    fn diagonalization() {
        let w = ctx(1.0);
        let g = diagonalization_gap(&TestFunction::gaussian(), &[0.1, 0.3, 0.5], &w).unwrap();
        assert!(g < 1e-8, "{g}");
    }

    #[test]
    fn parseval_and_round_trip() {
        let w = ctx(1.0);
        let psi = TestFunction::gaussian();
        let t = SpectralTransform::for_functions(w, TransformConfig::default(), &[&psi]).unwrap();
        let gap = t.parseval_gap(&psi).unwrap();
        assert!(gap < 1e-4, "{gap}");
        let err = t.round_trip_error(&psi, &[-1.0, 0.0, 1.0]).unwrap();
        assert!(err < 1e-4, "{err}");
        let zero = t.inverse(&t.forward(&TestFunction::zero()).unwrap(), &[0.0]).unwrap();
        assert_eq!(zero.values[0], c(0.0, 0.0));
    }
}
