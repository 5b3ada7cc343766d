//! Verification suites, one per acceptance criterion.
//!
//! Each suite returns a [`SuiteReport`] listing named checks with the
//! measured residual and the threshold it must stay below.

use crate::classical_bessel::{
    bessel_k, bessel_k_series, connection_residual, k_to_i_relation_check, kl_parseval_gap, kl_round_trip_error,
    ode_residual, quasi_periodicity_residual, tilde_s, wronskian_residual, KlConfig,
};
use crate::cmath::{c, rel_err, I};
use crate::contour_quadrature::{kashaev_l, QuadConfig};
use crate::error::Result;
use crate::params::LatticeParams;
use crate::qdilog::{conjugation_residual, ln_gamma, reflection_residual, residue_estimate, shift_residuals};
use crate::resolvent::{free_identity_check, symmetry_residual, Resolvent};
use crate::spectral_transform::{phi_plus_asymptotic_gap, scattering_s, SpectralTransform, TransformConfig};
use crate::testfunctions::TestFunction;
use crate::wavefunctions::WaveContext;
use crate::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;

/// One measured residual and its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self { name: name.into(), value, tol }
    }

    pub fn pass(&self) -> bool {
        self.value.is_finite() && self.value < self.tol
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Set when the suite aborted before finishing its checks.
    pub error: Option<String>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    /// The check closest to (or furthest past) its threshold.
    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().max_by(|a, b| {
            let ra = if a.pass() { a.value / a.tol } else { f64::INFINITY };
            let rb = if b.pass() { b.value / b.tol } else { f64::INFINITY };
            ra.total_cmp(&rb)
        })
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.value).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Replaces the default `b` values of every `b`-dependent suite.
    pub b_values: Option<Vec<f64>>,
    /// Seed for the random sample points.
    pub seed: u64,
    /// Thresholds below this value are raised to it.
    pub tol_floor: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { b_values: None, seed: 20240607, tol_floor: None }
    }
}

impl VerifyOptions {
    fn bs(&self, default: &[f64]) -> Vec<f64> {
        self.b_values.clone().unwrap_or_else(|| default.to_vec())
    }

    fn tol(&self, t: f64) -> f64 {
        self.tol_floor.map_or(t, |f| t.max(f))
    }
}

pub const SUITE_NAMES: [&str; 9] = [
    "gamma identities",
    "momentum equation",
    "eigenfunctions",
    "jost solutions",
    "resolvent",
    "transform",
    "scattering",
    "classical oracle",
    "classical ode",
];

type SuiteFn = fn(&VerifyOptions) -> Result<Vec<Check>>;

const SUITES: [SuiteFn; 9] = [
    gamma_suite,
    momentum_suite,
    eigenfunction_suite,
    jost_suite,
    resolvent_suite,
    transform_suite,
    scattering_suite,
    classical_suite,
    ode_suite,
];

/// Runs suite `id` (1-based).
pub fn run_suite(id: usize, opts: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let (checks, error) = match SUITES.get(id.wrapping_sub(1)) {
        Some(f) => match f(opts) {
            Ok(v) => (v, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        },
        None => (Vec::new(), Some(format!("no suite {id}"))),
    };
    SuiteReport {
        id,
        name: SUITE_NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        checks,
        error,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    (1..=SUITES.len()).map(|i| run_suite(i, opts)).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Fifty points inside the strip where both shift equations can be checked
/// with the integral representation alone.
fn strip_grid(p: &LatticeParams) -> Vec<C64> {
    let margin = 1.5e-3 * p.abs_omega_dprime();
    let h = 0.8 * (p.abs_omega().min(p.abs_omega_prime()) - margin).max(0.0);
    let mut out = Vec::with_capacity(50);
    for y in linspace(-h, h, 5) {
        for x in linspace(-2.05, 1.95, 10) {
            out.push(c(x, y));
        }
    }
    out
}

fn gamma_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let cfg = QuadConfig::with_tol(1e-15, 1e-13);
    let mut out = Vec::new();
    for b in o.bs(&[0.6, 1.0, 1.4]) {
        let p = LatticeParams::new(b)?;
        let d = p.dual();
        let (mut shift, mut refl, mut conj, mut modular) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for z in strip_grid(&p) {
            let (r1, r2) = shift_residuals(z, &p, &cfg)?;
            shift = shift.max(r1).max(r2);
            refl = refl.max(reflection_residual(z, &p)?);
            conj = conj.max(conjugation_residual(z, &p)?);
            modular = modular.max(rel_err(ln_gamma(z, &p)?.exp(), ln_gamma(z, &d)?.exp(), 0.0));
        }
        out.push(Check::new(format!("b={b} shift equations"), shift, o.tol(1e-8)));
        out.push(Check::new(format!("b={b} reflection"), refl, o.tol(1e-8)));
        out.push(Check::new(format!("b={b} conjugation"), conj, o.tol(1e-8)));
        out.push(Check::new(format!("b={b} modular b <-> 1/b"), modular, o.tol(1e-10)));
        let res = residue_estimate(&p, 1e-3 * b.min(1.0 / b))?;
        out.push(Check::new(format!("b={b} pole residue"), rel_err(res, p.c_residue, 0.0), o.tol(1e-5)));
    }
    let g10 = ln_gamma(c(10.0, 0.0), &LatticeParams::new(1.0)?)?.exp();
    out.push(Check::new("b=1 |gamma(10) - 1|", (g10 - 1.0).norm(), o.tol(1e-6)));
    Ok(out)
}

fn momentum_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let k = c(0.2, 0.0);
    for b in o.bs(&[1.0]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let l = kashaev_l(k, &w.params, w.sigma, 2.0)?;
        let mut pts = Vec::new();
        for (seg, n) in l.segments.iter().zip([3usize, 4, 3]) {
            let (t0, t1) = seg.range();
            for i in 0..n {
                pts.push(seg.point(t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64));
            }
        }
        let mut worst: f64 = 0.0;
        for p in pts {
            worst = worst.max(w.momentum_residual(p, k)?);
        }
        out.push(Check::new(format!("b={b} momentum equation on L"), worst, o.tol(1e-8)));
    }
    Ok(out)
}

fn eigenfunction_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(o.seed);
    for b in o.bs(&[0.7, 1.0, 1.4]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let pts: Vec<(f64, f64)> = (0..20).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.05..0.5))).collect();
        let mut ev: f64 = 0.0;
        for &(x, k) in &pts {
            ev = ev.max(w.ev_residual(c(x, 0.0), c(k, 0.0))?);
        }
        out.push(Check::new(format!("b={b} difference equation, 20 random points"), ev, o.tol(1e-5)));

        let mut dual: f64 = 0.0;
        for (x, k) in [(0.3, 0.25), (-0.5, 0.4)] {
            dual = dual.max(w.dual_equation_residual(c(x, 0.0), c(k, 0.0))?);
        }
        out.push(Check::new(format!("b={b} dual equation"), dual, o.tol(1e-5)));

        let (mut even, mut real) = (0.0f64, 0.0f64);
        for &(x, k) in &pts[..4] {
            let a = w.phi(c(x, 0.0), c(k, 0.0))?;
            let m = w.phi(c(x, 0.0), c(-k, 0.0))?;
            even = even.max(rel_err(a, m, 0.0));
            real = real.max(a.im.abs() / a.norm());
        }
        out.push(Check::new(format!("b={b} evenness in k"), even, o.tol(1e-8)));
        out.push(Check::new(format!("b={b} reality"), real, o.tol(1e-8)));

        let (lo, hi) = (w.params.abs_omega(), w.params.abs_omega_dprime());
        let s1 = w.with_sigma(lo + 0.2 * (hi - lo))?;
        let s2 = w.with_sigma(lo + 0.8 * (hi - lo))?;
        let mut sig: f64 = 0.0;
        for x in [-1.0, 0.0, 0.6] {
            let (x, k) = (c(x, 0.0), c(0.3, 0.0));
            let a = w.phi(x, k)?;
            sig = sig.max(rel_err(a, s1.phi_on_l(x, k)?, 0.0)).max(rel_err(a, s2.phi_on_l(x, k)?, 0.0));
        }
        out.push(Check::new(format!("b={b} independence of sigma"), sig, o.tol(1e-8)));
    }
    Ok(out)
}

fn jost_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for b in o.bs(&[1.0]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let (x, k) = (c(-4.0, 0.0), c(0.3, 0.0));
        let e = (2.0 * PI * I * k * x).exp();
        let fp = w.jost_f(x, k, 1.0)?;
        let fm = w.jost_f(x, k, -1.0)?;
        let asym = (fp - e).norm().max((fm - 1.0 / e).norm());
        out.push(Check::new(format!("b={b} f+- at x=-4"), asym, o.tol(1e-3)));

        let (x, k) = (c(0.8, 0.0), c(0.35, 0.0));
        let phi = w.phi(x, k)?;
        let rhs = w.coeff_m(k)? * w.jost_f(x, k, 1.0)? + w.coeff_m(-k)? * w.jost_f(x, k, -1.0)?;
        out.push(Check::new(format!("b={b} connection formula"), rel_err(phi, rhs, 0.0), o.tol(1e-5)));

        let k = c(0.3, 0.0);
        let expected = 2.0 * (2.0 * PI * b * k).sinh();
        let mut spread: f64 = 0.0;
        for x in [-1.0, 0.0, 1.3] {
            spread = spread.max(rel_err(w.casorati_jost(c(x, 0.0), k)?, expected, 0.0));
        }
        out.push(Check::new(format!("b={b} Casorati determinant"), spread, o.tol(1e-5)));
    }
    Ok(out)
}

fn resolvent_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let probe = [-1.0, 0.0, 1.0];
    let gs = [TestFunction::gaussian(), TestFunction::poly_gaussian(&[0.0, 1.0])];
    let cfg = QuadConfig::with_tol(1e-13, 1e-11);
    for b in o.bs(&[1.0]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let p = &w.params;
        let (x, y) = (c(0.4, 0.0), c(-0.7, 0.0));
        let (mut hom, mut sym, mut ident, mut free) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for lam in [c(-2.0, 0.0), c(2.0, 1.0)] {
            let pt = p.k_from_lambda(lam)?;
            let r = Resolvent::new(&w, &pt)?;
            hom = hom.max(r.homogeneous_residual(x, y)?);
            sym = sym.max(symmetry_residual(&r, x, y)?);
            for g in &gs {
                ident = ident.max(r.identity_residual(g, &probe)?);
                free = free.max(free_identity_check(g, &pt, p, &probe, &cfg)?);
            }
        }
        let lam = c(2.0, 1.0);
        let a = Resolvent::new(&w, &p.k_from_lambda(lam)?)?.kernel(x, y)?;
        let bc = Resolvent::new(&w, &p.k_from_lambda(lam.conj())?)?.kernel(x, y)?;
        out.push(Check::new(format!("b={b} homogeneous equation"), hom, o.tol(1e-5)));
        out.push(Check::new(format!("b={b} symmetry"), sym, o.tol(1e-10)));
        out.push(Check::new(format!("b={b} conjugation"), rel_err(a.conj(), bc, 0.0), o.tol(1e-10)));
        out.push(Check::new(format!("b={b} R(H-lambda)g = g"), ident, o.tol(1e-4)));
        out.push(Check::new(format!("b={b} R0(H0-lambda)g = g"), free, o.tol(1e-4)));
    }
    Ok(out)
}

fn transform_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let psis = [
        ("exp(-x^2)", TestFunction::gaussian()),
        ("x exp(-x^2)", TestFunction::poly_gaussian(&[0.0, 1.0])),
        ("(1+x) exp(-x^2)", TestFunction::poly_gaussian(&[1.0, 1.0])),
    ];
    let xs = linspace(-2.0, 2.0, 9);
    let kprobe = [0.2, 0.5, 0.9];
    for b in o.bs(&[0.8, 1.0]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let refs: Vec<&TestFunction> = psis.iter().map(|(_, p)| p).collect();
        let t = SpectralTransform::for_functions(w, TransformConfig::default(), &refs)?;
        let scale = refs.iter().map(|p| crate::spectral_transform::transform_scale(p, &w.params)).fold(0.0, f64::max);
        let probe = SpectralTransform::at_points(w, &kprobe, scale)?;
        for (name, psi) in &psis {
            out.push(Check::new(format!("b={b} {name} Parseval"), t.parseval_gap(psi)?, o.tol(1e-4)));
            out.push(Check::new(format!("b={b} {name} round trip"), t.round_trip_error(psi, &xs)?, o.tol(1e-4)));
            out.push(Check::new(format!("b={b} {name} diagonalization"), probe.diagonalization_gap(psi)?, o.tol(1e-4)));
        }
    }
    Ok(out)
}

fn scattering_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for b in o.bs(&[1.0]) {
        let w = WaveContext::new(LatticeParams::new(b)?);
        let mut unit: f64 = 0.0;
        for k in [0.1, 0.4, 1.0] {
            unit = unit.max((scattering_s(k, &w.params, w.k_exclusion)?.norm() - 1.0).abs());
        }
        out.push(Check::new(format!("b={b} |S(k)| = 1"), unit, o.tol(1e-10)));
        out.push(Check::new(format!("b={b} phi+ at x=-4"), phi_plus_asymptotic_gap(-4.0, 0.3, &w)?, o.tol(1e-3)));
        let gaps: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&k| Ok((scattering_s(k, &w.params, w.k_exclusion)? + 1.0).norm()))
            .collect::<Result<_>>()?;
        let ratio = gaps.windows(2).map(|g| g[1] / g[0]).fold(0.0, f64::max);
        out.push(Check::new(format!("b={b} |S(k)+1| shrinks as k halves"), ratio, 0.75));
    }
    Ok(out)
}

fn classical_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let cfg = QuadConfig::with_tol(1e-16, 1e-13);
    let mut out = Vec::new();
    let mut w: f64 = 0.0;
    for (x, nu) in [(0.2, c(0.3, 0.0)), (-0.5, c(0.3, 0.5)), (0.4, c(0.0, 0.7))] {
        w = w.max(wronskian_residual(x, nu, &cfg)?);
    }
    out.push(Check::new("Wronskian of I and I_-nu", w, o.tol(1e-8)));
    let mut rel: f64 = 0.0;
    for (x, nu) in [(0.3, c(0.4, 0.0)), (-0.7, c(0.0, 0.8)), (0.5, c(0.25, 0.6))] {
        rel = rel.max(k_to_i_relation_check(x, nu, &cfg)?).max(quasi_periodicity_residual(x, nu, &cfg)?);
    }
    out.push(Check::new("K from I and I from K", rel, o.tol(1e-8)));
    let mut ser: f64 = 0.0;
    for (x, k) in [(0.0, 1.0), (-1.0, 0.5), (0.5, 2.0), (1.0, 0.3), (-0.3, 0.05)] {
        let a = bessel_k(x, k, &cfg)?;
        let s = bessel_k_series(c(x, 0.0).exp(), c(0.0, k));
        ser = ser.max(rel_err(a, s, 0.0));
    }
    out.push(Check::new("K_ik against power series", ser, o.tol(1e-10)));
    let mut conn: f64 = 0.0;
    for (x, k) in [(0.3, 0.5), (-1.0, 1.2)] {
        conn = conn.max(connection_residual(x, k, &cfg)?);
    }
    out.push(Check::new("connection formula", conn, o.tol(1e-8)));
    let kl = KlConfig::default();
    let psi = TestFunction::poly_gaussian(&[0.0, 1.0]);
    out.push(Check::new("KL Parseval", kl_parseval_gap(&psi, &kl, &cfg)?, o.tol(1e-4)));
    let rt = kl_round_trip_error(&TestFunction::gaussian(), &[-2.0, -1.0, 0.0, 1.0], &kl, &cfg)?;
    out.push(Check::new("KL round trip", rt, o.tol(1e-4)));
    let mut unit: f64 = 0.0;
    for k in [0.1, 0.4, 1.0] {
        unit = unit.max((tilde_s(k)?.norm() - 1.0).abs());
    }
    out.push(Check::new("|S~(k)| = 1", unit, o.tol(1e-10)));
    out.push(Check::new("|S~(1e-4) + 1|", (tilde_s(1e-4)? + 1.0).norm(), o.tol(1e-3)));
    Ok(out)
}

fn ode_suite(o: &VerifyOptions) -> Result<Vec<Check>> {
    let cfg = QuadConfig::with_tol(1e-16, 1e-13);
    let mut worst: f64 = 0.0;
    for x in [-2.0, -1.0, 0.0, 0.5, 1.0] {
        for k in [0.3, 1.2] {
            worst = worst.max(ode_residual(x, k, 1e-3, &cfg)?);
        }
    }
    Ok(vec![Check::new("-psi'' + e^{2x} psi = k^2 psi at 10 points", worst, o.tol(1e-5))])
}
