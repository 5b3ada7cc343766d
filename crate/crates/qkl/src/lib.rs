//! Numerical spectral theory of the functional-difference operator
//! `H = U + U^{-1} + V`, where `U` shifts the argument by `2ω'` and `V`
//! multiplies by `e^{2πbx}`.
//!
//! The crate provides the modular quantum dilogarithm `γ(z)`, the
//! eigenfunctions `φ(x,k)` and Jost solutions `f±(x,k)`, the resolvent
//! kernels of `H` and of the free operator `H₀ = U + U^{-1}`, the
//! q-deformed Kontorovich-Lebedev transform together with the scattering
//! coefficient `S(k)`, and the classical Bessel-function counterparts.
//! Every analytic identity is exposed as a residual check, and the
//! [`verify`] module bundles them into suites.

pub mod classical_bessel;
pub mod cmath;
pub mod contour_quadrature;
pub mod error;
pub mod params;
pub mod qdilog;
pub mod resolvent;
pub mod spectral_transform;
pub mod testfunctions;
pub mod verify;
pub mod wavefunctions;

pub use num_complex::Complex64 as C64;

pub use contour_quadrature::{ContourRule, ContourSpec, Integral, QuadConfig, Segment};
pub use error::{Error, Result};
pub use params::{LatticeParams, SpectralPoint};
pub use qdilog::GammaValue;
pub use spectral_transform::SampledFunction;
pub use testfunctions::TestFunction;
pub use wavefunctions::WaveContext;
