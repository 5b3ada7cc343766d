//! Finite sums `Σ p_j(x) e^{-x² + c_j x}` with complex polynomial
//! coefficients. The family is closed under complex shifts, multiplication
//! by exponentials and linear combination, so `H` acts on it exactly.

use crate::cmath::c;
use crate::contour_quadrature::{integrate, ContourSpec, QuadConfig};
use crate::error::Result;
use crate::params::LatticeParams;
use crate::C64;
use std::f64::consts::PI;

/// Tolerance for merging exponents `c_j` during consolidation.
pub const MERGE_TOL: f64 = 1e-12;

/// One term `p(x) e^{-x² + c x}`; `poly[n]` is the coefficient of `x^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub poly: Vec<C64>,
    pub c: C64,
}

/// An element of the dense domain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestFunction {
    pub terms: Vec<Term>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn eval_poly(poly: &[C64], x: C64) -> C64 {
    poly.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Coefficients of `p(x + a)`.
fn shift_poly(poly: &[C64], a: C64) -> Vec<C64> {
    let n = poly.len();
    let mut out = vec![c(0.0, 0.0); n];
    for (m, &pm) in poly.iter().enumerate() {
        let mut apow = c(1.0, 0.0);
        for j in (0..=m).rev() {
            out[j] += pm * binomial(m, j) * apow;
            apow *= a;
        }
    }
    out
}

/// `E[(Y + m)^n]` for `Y ~ N(0, 1/2)`, for all `n` up to `deg`.
fn gaussian_moments_shifted(m: C64, deg: usize) -> Vec<C64> {
    let mut raw = vec![0.0; deg + 1];
    raw[0] = 1.0;
    for l in (2..=deg).step_by(2) {
        raw[l] = raw[l - 2] * (l as f64 - 1.0) / 2.0;
    }
    (0..=deg)
        .map(|n| {
            let mut s = c(0.0, 0.0);
            let mut mpow = c(1.0, 0.0);
            for l in (0..=n).rev() {
                if l % 2 == 0 {
                    s += binomial(n, l) * raw[l] * mpow;
                }
                mpow *= m;
            }
            s
        })
        .collect()
}

impl Term {
    pub fn eval(&self, x: C64) -> C64 {
        eval_poly(&self.poly, x) * (-(x * x) + self.c * x).exp()
    }

    /// `∫ p(x) e^{-x² + a x} dx` with `a = c - 2πiξ`.
    fn fourier(&self, xi: C64) -> C64 {
        let a = self.c - 2.0 * PI * c(0.0, 1.0) * xi;
        let moments = gaussian_moments_shifted(a / 2.0, self.poly.len().saturating_sub(1));
        let s: C64 = self.poly.iter().zip(&moments).map(|(p, m)| p * m).sum();
        PI.sqrt() * (a * a / 4.0).exp() * s
    }
}

impl TestFunction {
    /// `p(x) e^{-x² + c x}`.
    pub fn term(poly: Vec<C64>, c: C64) -> Self {
        Self { terms: vec![Term { poly, c }] }
    }

    /// `e^{-x²}`.
    pub fn gaussian() -> Self {
        Self::term(vec![c(1.0, 0.0)], c(0.0, 0.0))
    }

    /// Real polynomial times `e^{-x²}`.
    pub fn poly_gaussian(coeffs: &[f64]) -> Self {
        Self::term(coeffs.iter().map(|&a| c(a, 0.0)).collect(), c(0.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// `x ↦ ψ(x + a)`.
    pub fn shift(&self, a: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let f = (-(a * a) + t.c * a).exp();
                Term { poly: shift_poly(&t.poly, a).into_iter().map(|p| p * f).collect(), c: t.c - 2.0 * a }
            })
            .collect();
        Self { terms }.consolidate()
    }

    /// `x ↦ e^{μx} ψ(x)`.
    pub fn mul_exp(&self, mu: C64) -> Self {
        let terms = self.terms.iter().map(|t| Term { poly: t.poly.clone(), c: t.c + mu }).collect();
        Self { terms }
    }

    pub fn scale(&self, s: C64) -> Self {
        let terms = self.terms.iter().map(|t| Term { poly: t.poly.iter().map(|p| p * s).collect(), c: t.c }).collect();
        Self { terms }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }.consolidate()
    }

    /// Merges terms whose exponents agree within [`MERGE_TOL`] and drops zero terms.
    pub fn consolidate(self) -> Self {
        let mut out: Vec<Term> = Vec::new();
        for t in self.terms {
            if let Some(o) = out.iter_mut().find(|o| (o.c - t.c).norm() <= MERGE_TOL) {
                if o.poly.len() < t.poly.len() {
                    o.poly.resize(t.poly.len(), c(0.0, 0.0));
                }
                for (a, b) in o.poly.iter_mut().zip(&t.poly) {
                    *a += b;
                }
            } else {
                out.push(t);
            }
        }
        for t in &mut out {
            while t.poly.len() > 1 && t.poly.last().is_some_and(|p| *p == c(0.0, 0.0)) {
                t.poly.pop();
            }
        }
        out.retain(|t| t.poly.iter().any(|p| *p != c(0.0, 0.0)));
        Self { terms: out }
    }

    /// `(H₀ψ)(x) = ψ(x + 2ω') + ψ(x - 2ω')`.
    pub fn apply_h0(&self, p: &LatticeParams) -> Self {
        let s = 2.0 * p.omega_prime;
        self.shift(s).add(&self.shift(-s))
    }

    /// `(Hψ)(x) = ψ(x + 2ω') + ψ(x - 2ω') + e^{2πbx} ψ(x)`.
    pub fn apply_h(&self, p: &LatticeParams) -> Self {
        self.apply_h0(p).add(&self.mul_exp(c(2.0 * PI * p.b, 0.0)))
    }

    /// `(H - λ)ψ`.
    pub fn apply_h_minus(&self, p: &LatticeParams, lambda: C64) -> Self {
        self.apply_h(p).add(&self.scale(-lambda))
    }

    /// The real interval outside which every term is below `e^{-margin²}` relative to its peak.
    pub fn support(&self, margin: f64) -> (f64, f64) {
        let lo = self.terms.iter().map(|t| t.c.re / 2.0).fold(f64::INFINITY, f64::min);
        let hi = self.terms.iter().map(|t| t.c.re / 2.0).fold(f64::NEG_INFINITY, f64::max);
        let deg = self.terms.iter().map(|t| t.poly.len()).max().unwrap_or(1) as f64;
        let pad = margin + deg.sqrt();
        if lo.is_finite() {
            (lo - pad, hi + pad)
        } else {
            (-pad, pad)
        }
    }

    /// `∫|ψ|²` over the real line, truncated where the Gaussian envelope is negligible.
    pub fn l2_norm_sq(&self, cfg: &QuadConfig) -> Result<f64> {
        let (lo, hi) = self.support(7.0);
        let line = ContourSpec::polyline("l2", &[c(lo, 0.0), c(hi, 0.0)]);
        Ok(integrate(|x| c(self.eval(x).norm_sqr(), 0.0), &line, cfg)?.value.re)
    }

    /// `⟨φ, ψ⟩ = ∫ conj(φ) ψ` over the real line.
    pub fn inner(&self, other: &Self, cfg: &QuadConfig) -> Result<C64> {
        let (a, b) = self.support(7.0);
        let (c2, d) = other.support(7.0);
        let line = ContourSpec::polyline("inner", &[c(a.max(c2), 0.0), c(b.min(d), 0.0)]);
        Ok(integrate(|x| self.eval(x).conj() * other.eval(x), &line, cfg)?.value)
    }

    /// Exact Fourier image `ψ̂(ξ) = ∫ ψ(x) e^{-2πiξx} dx`.
    pub fn fourier(&self) -> FourierImage {
        FourierImage { source: self.clone() }
    }

    /// Whether all coefficients and exponents are real.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.c.im == 0.0 && t.poly.iter().all(|p| p.im == 0.0))
    }
}

/// Closed-form Fourier transform of a [`TestFunction`], entire in `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierImage {
    source: TestFunction,
}

impl FourierImage {
    pub fn eval(&self, xi: C64) -> C64 {
        self.source.terms.iter().map(|t| t.fourier(xi)).sum()
    }

    /// `∫|ψ̂(ξ)|² dξ` over the real line.
    pub fn l2_norm_sq(&self, cfg: &QuadConfig) -> Result<f64> {
        let spread = self.source.terms.iter().map(|t| t.c.im.abs() / (2.0 * PI)).fold(0.0, f64::max);
        let deg = self.source.terms.iter().map(|t| t.poly.len()).max().unwrap_or(1) as f64;
        let l = spread + 3.0 + deg.sqrt() * 0.5;
        let line = ContourSpec::polyline("l2-hat", &[c(-l, 0.0), c(l, 0.0)]);
        Ok(integrate(|x| c(self.eval(x).norm_sqr(), 0.0), &line, cfg)?.value.re)
    }
}
