//! Eigenfunctions of `H`: the momentum-space solution `ĥφ(p,k)`, the
//! scattering solution `φ(x,k)`, the coefficient `M(k)`, the Jost solutions
//! `f±(x,k)` and Casorati determinants.
//!
//! `φ(x,k) = ∫ ĥφ(p,k) e^{2πipx} dp` is taken over a contour that starts
//! and ends on rays of slope `±1` in the lower half plane, where the
//! integrand decays like `e^{-πt²}`, and passes above the poles `p = ±k`.
//! Any such contour gives the same value; the one used for a given `x` is
//! chosen by [`phi_contour`] to keep the integrand free of cancellation.

use crate::cmath::{c, rel_err, I};
use crate::contour_quadrature::{ContourRule, ContourSpec, QuadConfig, Segment};
use crate::error::{Error, Result};
use crate::params::LatticeParams;
use crate::qdilog::ln_gamma;
use crate::C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Height of the contour above the poles `p = ±k`.
pub const POLE_CLEARANCE: f64 = 0.25;

const RULE_ORDER: usize = 16;

/// Shared settings of the wavefunction evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    pub params: LatticeParams,
    /// Height of the horizontal part of the reference contour `L`.
    pub sigma: f64,
    pub cfg: QuadConfig,
    /// Radius around `k = 0` where `M(k)` and the Jost solutions are not evaluated.
    pub k_exclusion: f64,
    /// Panel-length multiplier of the fixed contour rules; smaller is finer.
    pub resolution: f64,
}

impl WaveContext {
    pub fn new(params: LatticeParams) -> Self {
        Self {
            params,
            sigma: 0.5 * (params.abs_omega() + params.abs_omega_dprime()),
            cfg: QuadConfig::default(),
            k_exclusion: 1e-2,
            resolution: 1.0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        let (lo, hi) = (self.params.abs_omega(), self.params.abs_omega_dprime());
        if !(sigma > lo && sigma < hi) {
            return Err(Error::Domain(format!("sigma = {sigma} must lie in ({lo}, {hi})")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    fn check_k(&self, k: C64) -> Result<C64> {
        let w = self.params.abs_omega();
        if !(k.re.is_finite() && k.im.is_finite()) || k.im.abs() > w * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("k = {k} outside the physical strip |Im k| <= {w}")));
        }
        Ok(if k.im < 0.0 { -k } else { k })
    }

    fn check_k_nonzero(&self, k: C64) -> Result<C64> {
        let k = self.check_k(k)?;
        if k.norm() <= self.k_exclusion {
            return Err(Error::Degenerate(format!(
                "|k| = {} inside the exclusion radius {}",
                k.norm(),
                self.k_exclusion
            )));
        }
        Ok(k)
    }

    /// `ln ĥφ(p,k)`.
    pub fn ln_hat_phi(&self, p: C64, k: C64) -> Result<C64> {
        let par = &self.params;
        let wdd = par.omega_dprime;
        let q = p - wdd;
        let base = -I * (par.beta + PI * k * k) - I * PI * q * q;
        let g1 = ln_gamma(p + k - wdd, par).map_err(|_| Error::Singular(format!("p = {p} at a pole of hat_phi")))?;
        let g2 = ln_gamma(p - k - wdd, par).map_err(|_| Error::Singular(format!("p = {p} at a pole of hat_phi")))?;
        Ok(base + g1 + g2)
    }

    /// `ĥφ(p,k) = c(k) e^{-πi(p-ω'')²} γ(p+k-ω'') γ(p-k-ω'')` with `c(k) = e^{-iβ-πik²}`.
    pub fn hat_phi(&self, p: C64, k: C64) -> Result<C64> {
        Ok(self.ln_hat_phi(p, k)?.exp())
    }

    /// Samples `ĥφ(·,k)` on a fixed rule along `contour`, resolving
    /// oscillations `e^{2πipx}` for `|x| ≤ x_scale`.
    pub fn phi_nodes(&self, k: C64, contour: &ContourSpec, x_scale: f64) -> Result<PhiNodes> {
        let k = self.check_k(k)?;
        let rule = contour.rule(RULE_ORDER, |z| self.panel_length(z, k, x_scale));
        let mut logs = Vec::with_capacity(rule.len());
        for (p, w) in rule.nodes.iter().zip(&rule.weights) {
            logs.push(self.ln_hat_phi(*p, k)? + w.ln());
        }
        Ok(PhiNodes { nodes: rule.nodes, log_weights: logs })
    }

    fn panel_length(&self, z: C64, k: C64, x_scale: f64) -> f64 {
        let mut dist = f64::INFINITY;
        for s in [k, -k] {
            let d = if z.im >= s.im { (z - s).norm() } else { (z.re - s.re).abs().max(0.5 * (z - s).norm()) };
            dist = dist.min(d);
        }
        let wdd = self.params.omega_dprime;
        let osc = 8.0 / (2.0 * PI * (x_scale + (z - wdd).norm() + 1.0));
        self.resolution * (0.5f64).min(0.8 * dist).min(osc)
    }

    /// `φ(x,k)` on the adapted contour of [`phi_contour`].
    pub fn phi(&self, x: C64, k: C64) -> Result<C64> {
        Ok(self.phi_many(&[x], k)?[0])
    }

    /// `φ(x_j,k)` for many points, sharing one contour per group of nearby `x`.
    pub fn phi_many(&self, xs: &[C64], k: C64) -> Result<Vec<C64>> {
        let mut out = vec![c(0.0, 0.0); xs.len()];
        for (nodes, idx) in self.node_groups(xs, k)? {
            for j in idx {
                out[j] = nodes.phi(xs[j]);
            }
        }
        Ok(out)
    }

    /// Partitions `xs` into groups that share an integration contour and
    /// samples `ĥφ(·,k)` once per group.
    pub fn node_groups(&self, xs: &[C64], k: C64) -> Result<Vec<(PhiNodes, Vec<usize>)>> {
        let k = self.check_k(k)?;
        let mut groups: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
        for (j, x) in xs.iter().enumerate() {
            groups.entry(contour_class(*x)).or_default().push(j);
        }
        let mut out = Vec::with_capacity(groups.len());
        for (key, idx) in groups {
            let (contour, scale) = if key == LOW_CLASS {
                let s = idx.iter().map(|&j| xs[j].re.abs() + xs[j].im.abs()).fold(0.0, f64::max);
                (transform_contour(k, &self.params, s), s + 0.5)
            } else {
                let (xr, xi) = class_representative(key);
                (phi_contour(k, c(xr, xi), &self.params), xr.abs() + xi.abs() + 0.5)
            };
            out.push((self.phi_nodes(k, &contour, scale)?, idx));
        }
        Ok(out)
    }

    /// `φ(x,k)` on an explicitly given contour.
    pub fn phi_on(&self, x: C64, k: C64, contour: &ContourSpec) -> Result<C64> {
        Ok(self.phi_nodes(k, contour, x.norm())?.phi(x))
    }

    /// `φ(x,k)` on the reference contour `L` at height `self.sigma`.
    pub fn phi_on_l(&self, x: C64, k: C64) -> Result<C64> {
        let k = self.check_k(k)?;
        let t = ray_length(x);
        let contour = crate::contour_quadrature::kashaev_l(k, &self.params, self.sigma, t)?;
        self.phi_on(x, k, &contour)
    }

    /// `M(k) = e^{i(β+π/4) - 2πik(k-ω'')} γ(2k - ω'')`.
    pub fn coeff_m(&self, k: C64) -> Result<C64> {
        if k.norm() <= self.k_exclusion {
            return Err(Error::Pole(k));
        }
        Ok(self.ln_coeff_m(k)?.exp())
    }

    /// Logarithm of [`Self::coeff_m`].
    pub fn ln_coeff_m(&self, k: C64) -> Result<C64> {
        let p = &self.params;
        let wdd = p.omega_dprime;
        Ok(I * (p.beta + PI / 4.0) - 2.0 * PI * I * k * (k - wdd) + ln_gamma(2.0 * k - wdd, p)?)
    }

    /// `φ(x-2ω) - φ(x+2ω) + 2 sign·sinh(2πk/b) φ(x)` for each `x`.
    fn jost_numerators(&self, xs: &[C64], k: C64, sign: f64) -> Result<Vec<C64>> {
        let w2 = 2.0 * self.params.omega;
        let mut pts = Vec::with_capacity(3 * xs.len());
        for &x in xs {
            pts.extend_from_slice(&[x - w2, x + w2, x]);
        }
        let vals = self.phi_many(&pts, k)?;
        let s = sign * 2.0 * (2.0 * PI * k / self.params.b).sinh();
        Ok(vals.chunks(3).map(|v| v[0] - v[1] + s * v[2]).collect())
    }

    /// Jost solutions `f₊(x,k) = f(x,k)` (`sign = +1`) and `f₋(x,k) = f(x,-k)`
    /// (`sign = -1`), with
    /// `f(x,k) = [φ(x-2ω) - φ(x+2ω) + 2sinh(2πk/b)φ(x)] / (4 sinh(2πk/b) M(k))`.
    pub fn jost_f(&self, x: C64, k: C64, sign: f64) -> Result<C64> {
        Ok(self.jost_many(&[x], k, sign)?[0])
    }

    pub fn jost_many(&self, xs: &[C64], k: C64, sign: f64) -> Result<Vec<C64>> {
        self.check_k_nonzero(k)?;
        let kk = sign * k;
        let denom = 4.0 * (2.0 * PI * kk / self.params.b).sinh() * self.coeff_m(kk)?;
        let num = self.jost_numerators(xs, k, sign)?;
        Ok(num.into_iter().map(|n| n / denom).collect())
    }

    /// The Casorati determinant `u(x+2ω')v(x) - u(x)v(x+2ω')`.
    pub fn casorati(&self, u: impl Fn(C64) -> Result<C64>, v: impl Fn(C64) -> Result<C64>, x: C64) -> Result<C64> {
        let s = 2.0 * self.params.omega_prime;
        Ok(u(x + s)? * v(x)? - u(x)? * v(x + s)?)
    }

    /// `C(f₋, f₊)(x,k)`, expected to equal `2sinh(2πbk)`.
    pub fn casorati_jost(&self, x: C64, k: C64) -> Result<C64> {
        let s = 2.0 * self.params.omega_prime;
        let fm = self.jost_many(&[x, x + s], k, -1.0)?;
        let fp = self.jost_many(&[x, x + s], k, 1.0)?;
        Ok(fm[1] * fp[0] - fm[0] * fp[1])
    }

    /// Relative residual of `ψ(x+s) + ψ(x-s) + e^{ax}ψ(x) = Λψ(x)` with the
    /// scale taken as the largest of the four terms.
    fn difference_residual(&self, x: C64, k: C64, shift: C64, growth: f64, lam: C64) -> Result<f64> {
        let v = self.phi_many(&[x + shift, x - shift, x], k)?;
        let e = (growth * x).exp() * v[2];
        let terms = [v[0], v[1], e, lam * v[2]];
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Ok((v[0] + v[1] + e - lam * v[2]).norm() / scale)
    }

    /// Residual of `φ(x+2ω') + φ(x-2ω') + e^{2πbx}φ(x) = 2cosh(2πbk)φ(x)`.
    pub fn ev_residual(&self, x: C64, k: C64) -> Result<f64> {
        let p = &self.params;
        self.difference_residual(x, k, 2.0 * p.omega_prime, 2.0 * PI * p.b, p.lambda_of(k))
    }

    /// Residual of `φ(x+2ω) + φ(x-2ω) + e^{2πx/b}φ(x) = 2cosh(2πk/b)φ(x)`.
    pub fn dual_equation_residual(&self, x: C64, k: C64) -> Result<f64> {
        let p = &self.params;
        let lam = 2.0 * (2.0 * PI * k / p.b).cosh();
        self.difference_residual(x, k, 2.0 * p.omega, 2.0 * PI / p.b, lam)
    }

    /// Relative residual of `ĥφ(p+2ω',k) = 2(cosh(2πbk) - cosh(2πbp)) ĥφ(p,k)`.
    pub fn momentum_residual(&self, p: C64, k: C64) -> Result<f64> {
        let b = self.params.b;
        let lhs = self.ln_hat_phi(p + 2.0 * self.params.omega_prime, k)?.exp();
        let f = 2.0 * ((2.0 * PI * b * k).cosh() - (2.0 * PI * b * p).cosh());
        let rhs = f * self.ln_hat_phi(p, k)?.exp();
        Ok(rel_err(lhs, rhs, 0.0))
    }
}

/// `φ(·,k)` sampled through `ĥφ` on the nodes of a fixed contour rule.
#[derive(Debug, Clone)]
pub struct PhiNodes {
    pub nodes: Vec<C64>,
    /// `ln(w_j ĥφ(p_j,k))`.
    pub log_weights: Vec<C64>,
}

impl PhiNodes {
    /// `Σ w_j ĥφ(p_j) e^{2πip_j x}`.
    pub fn phi(&self, x: C64) -> C64 {
        let tpi = 2.0 * PI * I * x;
        self.nodes.iter().zip(&self.log_weights).map(|(p, l)| (l + tpi * p).exp()).sum()
    }

    /// `Σ w_j ĥφ(p_j) g(p_j)` for an arbitrary entire weight `g`.
    pub fn pair(&self, mut g: impl FnMut(C64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.log_weights).map(|(p, l)| l.exp() * g(*p)).sum()
    }

    /// `Σ |w_j ĥφ(p_j) e^{2πip_j x}|`, the size of the terms that cancel in [`Self::phi`].
    pub fn abs_sum(&self, x: C64) -> f64 {
        let tpi = 2.0 * PI * I * x;
        self.nodes.iter().zip(&self.log_weights).map(|(p, l)| (l + tpi * p).re.exp()).sum()
    }

    /// The same sum with `ĥφ(p)` replaced by `ĥφ(p)g(p)`.
    pub fn with_multiplier(&self, mut g: impl FnMut(C64) -> C64) -> PhiNodes {
        let log_weights = self.nodes.iter().zip(&self.log_weights).map(|(p, l)| l + g(*p).ln()).collect();
        PhiNodes { nodes: self.nodes.clone(), log_weights }
    }

    pub fn rule(&self) -> ContourRule {
        ContourRule { nodes: self.nodes.clone(), weights: self.log_weights.iter().map(|l| l.exp()).collect() }
    }
}

const CLASS_X: f64 = 0.5;
const CLASS_Y: f64 = 0.25;

const LOW_CLASS: (i64, i64) = (i64::MIN, 0);

/// Points with `Re x ≤ 0` all use the low contour; the others are binned.
fn contour_class(x: C64) -> (i64, i64) {
    if x.re <= 0.0 {
        return LOW_CLASS;
    }
    ((x.re / CLASS_X).floor() as i64, (x.im / CLASS_Y).round() as i64)
}

fn class_representative(key: (i64, i64)) -> (f64, f64) {
    ((key.0 as f64 + 0.5) * CLASS_X, key.1 as f64 * CLASS_Y)
}

/// Length of the descending rays for a given `x`: the Gaussian decay must
/// overcome the linear growth of `e^{2πipx}` along the ray.
fn ray_length(x: C64) -> f64 {
    let s = std::f64::consts::SQRT_2 * (x.re.abs() + x.im.abs());
    0.5 * s + (0.25 * s * s + 50.0 / PI).sqrt()
}

/// The integration contour for `φ(x,k)`.
///
/// For `Re x ≤ 0` the horizontal part runs just above the poles `±k`,
/// since `e^{2πipx}` grows with `Im p`. For `Re x > 0` the corners are
/// placed at the saddle points `∓Re x + i(|ω''| ∓ Im x)` of the asymptotic
/// integrand, which removes the cancellation between the rays and the
/// horizontal part.
pub fn phi_contour(k: C64, x: C64, params: &LatticeParams) -> ContourSpec {
    let k = if k.im < 0.0 { -k } else { k };
    let a_min = k.re.abs() + POLE_CLEARANCE;
    let h_low = k.im.abs() + POLE_CLEARANCE;
    let wdd = params.abs_omega_dprime();
    let (left, right) = if x.re <= 0.0 {
        (c(-a_min, h_low), c(a_min, h_low))
    } else {
        let a = x.re.max(a_min);
        (c(-a, (wdd - x.im).max(h_low)), c(a, (wdd + x.im).max(h_low)))
    };
    let t = ray_length(x);
    let mut contour = ContourSpec::new("phi")
        .with_segment(Segment::ray(left, C64::from_polar(1.0, PI / 4.0), -t, 0.0))
        .with_segment(Segment::line(left, right))
        .with_segment(Segment::ray(right, C64::from_polar(1.0, -PI / 4.0), 0.0, t));
    contour.truncation = Some(t);
    contour
}

/// The contour used by the spectral transform: the low contour, valid for all `x`.
pub fn transform_contour(k: C64, params: &LatticeParams, x_scale: f64) -> ContourSpec {
    phi_contour(k, c(-x_scale.abs(), 0.0), params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(b: f64) -> WaveContext {
        WaveContext::new(LatticeParams::new(b).unwrap())
    }

    #[test]
    fn hat_phi_symmetry() {
        let w = ctx(1.0);
        let (p, k) = (c(0.3, 0.75), c(0.2, 0.0));
        let lhs = w.hat_phi(p, k).unwrap().conj();
        let rhs = w.hat_phi(-p.conj(), -k.conj()).unwrap();
        assert!(rel_err(lhs, rhs, 0.0) < 1e-12);
    }

    #[test]
    fn hat_phi_functional_equation() {
        let w = ctx(1.0);
        assert!(w.momentum_residual(c(0.4, 0.75), c(0.2, 0.0)).unwrap() < 1e-8);
    }

    #[test]
    fn hat_phi_decay_envelope() {
        let w = ctx(1.0);
        let k = c(0.2, 0.0);
        let wdd = w.params.abs_omega_dprime();
        let r1 = w.hat_phi(c(5.0, 0.75), k).unwrap().norm() / (-2.0 * PI * 5.0 * (wdd - 0.75)).exp();
        let r2 = w.hat_phi(c(-5.0, 0.75), k).unwrap().norm() / (-2.0 * PI * 5.0 * (wdd - 0.75)).exp();
        assert!(r1 > 0.1 && r1 < 10.0, "{r1}");
        assert!(r2 > 0.1 && r2 < 10.0, "{r2}");
    }

    #[test]
    fn difference_equation_example() {
        let w = ctx(1.0);
        assert!(w.ev_residual(c(0.5, 0.0), c(0.3, 0.0)).unwrap() < 1e-5);
    }

    #[test]
    fn phi_even_and_real() {
        let w = ctx(1.0);
        let a = w.phi(c(0.7, 0.0), c(0.3, 0.0)).unwrap();
        let b = w.phi(c(0.7, 0.0), c(-0.3, 0.0)).unwrap();
        assert!(rel_err(a, b, 0.0) < 1e-8);
        assert!(a.im.abs() < 1e-10 * a.norm());
    }

    #[test]
    fn spectral_density_identity() {
        let w = ctx(1.0);
        let k = c(0.25, 0.0);
        let m = w.coeff_m(k).unwrap() * w.coeff_m(-k).unwrap();
        let rho = 4.0 * (2.0 * PI * k).sinh() * (2.0 * PI * k).sinh();
        assert!(rel_err(1.0 / m, rho, 0.0) < 1e-8);
    }

    #[test]
    fn m_conjugation_and_pole() {
        let w = ctx(1.0);
        let k = c(0.4, 0.0);
        assert!(rel_err(w.coeff_m(k).unwrap().conj(), w.coeff_m(-k).unwrap(), 0.0) < 1e-12);
        let r1 = 2.0 * 1e-2 * w.coeff_m(c(2e-2, 0.0)).unwrap();
        let r2 = 2.0 * 5e-3 * w.coeff_m(c(1e-2 + 1e-9, 0.0)).unwrap();
        assert!(rel_err(r1, r2, 0.0) < 0.1, "{r1} {r2}");
        assert!(w.coeff_m(c(1e-3, 0.0)).is_err());
    }

    #[test]
    fn left_asymptotics() {
        let w = ctx(1.0);
        let (x, k) = (c(-4.0, 0.0), c(0.3, 0.0));
        let phi = w.phi(x, k).unwrap();
        let m = w.coeff_m(k).unwrap();
        let asym = m * (2.0 * PI * I * k * x).exp() + m.conj() * (-2.0 * PI * I * k * x).exp();
        assert!((phi - asym).norm() < 1e-3 * phi.norm());
        let fp = w.jost_f(x, k, 1.0).unwrap();
        assert!((fp - (2.0 * PI * I * k * x).exp()).norm() < 1e-3);
    }

    #[test]
    fn connection_formula() {
        let w = ctx(1.0);
        let (x, k) = (c(0.8, 0.0), c(0.35, 0.0));
        let phi = w.phi(x, k).unwrap();
        let rhs = w.coeff_m(k).unwrap() * w.jost_f(x, k, 1.0).unwrap()
            + w.coeff_m(-k).unwrap() * w.jost_f(x, k, -1.0).unwrap();
        assert!(rel_err(phi, rhs, 0.0) < 1e-5, "{phi} {rhs}");
    }

    #[test]
    fn casorati_value() {
        let w = ctx(1.0);
        let k = c(0.3, 0.0);
        let expected = 2.0 * (0.6 * PI).sinh();
        for x in [-1.0, 0.0, 1.3] {
            let v = w.casorati_jost(c(x, 0.0), k).unwrap();
            assert!(rel_err(v, c(expected, 0.0), 0.0) < 1e-5, "x={x} {v}");
        }
        let u = |x: C64| w.phi(x, k);
        assert!(w.casorati(u, u, c(0.2, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn dual_equation() {
        for b in [1.0, 1.3] {
            let w = ctx(b);
            assert!(w.dual_equation_residual(c(0.3, 0.0), c(0.25, 0.0)).unwrap() < 1e-5, "b={b}");
        }
    }

    #[test]
    fn contour_independence() {
        let w = ctx(1.0);
        let k = c(0.3, 0.0);
        for x in [-1.0, 0.0, 0.6] {
            let a = w.phi(c(x, 0.0), k).unwrap();
            let b = w.with_sigma(0.6).unwrap().phi_on_l(c(x, 0.0), k).unwrap();
            let d = w.with_sigma(0.9).unwrap().phi_on_l(c(x, 0.0), k).unwrap();
            assert!(rel_err(a, b, 0.0) < 1e-8 && rel_err(b, d, 0.0) < 1e-8, "x={x} {a} {b} {d}");
        }
    }
}
