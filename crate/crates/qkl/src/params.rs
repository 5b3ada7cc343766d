//! Half-period lattice conventions and the spectral parametrization
//! `λ = 2cosh(2πbk)`.

use crate::cmath::c;
use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

/// All derived constants of the lattice `ω = i/(2b)`, `ω' = ib/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub b: f64,
    pub omega: C64,
    pub omega_prime: C64,
    pub omega_dprime: C64,
    pub tau: f64,
    pub q: C64,
    pub beta: f64,
    pub c_residue: C64,
}

impl LatticeParams {
    /// Builds the lattice for the given `b > 0`.
    pub fn new(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter(format!("b must be positive and finite, got {b}")));
        }
        let tau = b * b;
        let beta = PI / 12.0 * (tau + 1.0 / tau);
        Ok(Self {
            b,
            omega: c(0.0, 0.5 / b),
            omega_prime: c(0.0, 0.5 * b),
            omega_dprime: c(0.0, 0.5 / b + 0.5 * b),
            tau,
            q: C64::from_polar(1.0, PI * tau),
            beta,
            c_residue: C64::from_polar(1.0 / (2.0 * PI), PI / 4.0 - beta),
        })
    }

    /// `|ω| = 1/(2b)`.
    pub fn abs_omega(&self) -> f64 {
        self.omega.im
    }

    /// `|ω'| = b/2`.
    pub fn abs_omega_prime(&self) -> f64 {
        self.omega_prime.im
    }

    /// `|ω''| = (b + 1/b)/2`.
    pub fn abs_omega_dprime(&self) -> f64 {
        self.omega_dprime.im
    }

    /// The parameters for `1/b`, which exchange `ω` and `ω'`.
    pub fn dual(&self) -> Self {
        Self::new(1.0 / self.b).expect("dual of a valid lattice is valid")
    }

    /// `λ = 2cosh(2πbk)`.
    pub fn lambda_of(&self, k: C64) -> C64 {
        2.0 * (2.0 * PI * self.b * k).cosh()
    }

    /// Spectral point for `k` in the closed physical strip `0 ≤ Im k ≤ |ω|`.
    pub fn spectral_point(&self, k: C64) -> Result<SpectralPoint> {
        let tol = 1e-14 * (1.0 + self.abs_omega());
        if !(k.re.is_finite() && k.im.is_finite()) || k.im < -tol || k.im > self.abs_omega() + tol {
            return Err(Error::Domain(format!("k = {k} outside the physical strip 0 <= Im k <= {}", self.abs_omega())));
        }
        Ok(SpectralPoint { k, lambda: self.lambda_of(k) })
    }

    /// Inverse of [`Self::spectral_point`] on `ℂ∖[2,∞)`, with `0 < Im k ≤ |ω|`.
    pub fn k_from_lambda(&self, lambda: C64) -> Result<SpectralPoint> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} is not finite")));
        }
        if lambda.im == 0.0 && lambda.re >= 2.0 {
            return Err(Error::Branch(format!("lambda = {} lies on the spectrum [2, inf)", lambda.re)));
        }
        let half = lambda / 2.0;
        let mut w = half.acosh();
        if w.im < 0.0 {
            w = -w;
        }
        if w.im == 0.0 {
            return Err(Error::Branch(format!("lambda = {lambda} lies on the spectrum [2, inf)")));
        }
        if w.re < 0.0 && (w.im - PI).abs() < 1e-15 {
            w.re = -w.re;
        }
        let k = w / (2.0 * PI * self.b);
        Ok(SpectralPoint { k, lambda })
    }
}

/// A spectral parameter `k` with its eigenvalue `λ = 2cosh(2πbk)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub k: C64,
    pub lambda: C64,
}
