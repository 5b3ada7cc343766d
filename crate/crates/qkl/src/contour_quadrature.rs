//! Complex contour integration: piecewise contours, an adaptive
//! Gauss-Legendre engine with order-doubling error estimates, and fixed
//! composite rules for integrands that are evaluated many times.

use crate::error::{Error, Result};
use crate::params::LatticeParams;
use crate::C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// One parametrized piece of a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `z(t) = start + dir·t` for `t ∈ [t0, t1]`, `|dir| = 1`.
    Line { start: C64, dir: C64, t0: f64, t1: f64 },
    /// `z(θ) = center + radius·e^{iθ}` for `θ ∈ [theta0, theta1]`.
    Arc { center: C64, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    /// Straight segment from `a` to `b`.
    pub fn line(a: C64, b: C64) -> Self {
        let d = b - a;
        let len = d.norm();
        Segment::Line { start: a, dir: d / len, t0: 0.0, t1: len }
    }

    /// Ray `start + dir·t`, `t ∈ [t0, t1]`, with `dir` normalized.
    pub fn ray(start: C64, dir: C64, t0: f64, t1: f64) -> Self {
        Segment::Line { start, dir: dir / dir.norm(), t0, t1 }
    }

    pub fn arc(center: C64, radius: f64, theta0: f64, theta1: f64) -> Self {
        Segment::Arc { center, radius, theta0, theta1 }
    }

    pub fn range(&self) -> (f64, f64) {
        match *self {
            Segment::Line { t0, t1, .. } => (t0, t1),
            Segment::Arc { theta0, theta1, .. } => (theta0, theta1),
        }
    }

    #[inline]
    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { start, dir, .. } => start + dir * t,
            Segment::Arc { center, radius, .. } => center + C64::from_polar(radius, t),
        }
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> C64 {
        match *self {
            Segment::Line { dir, .. } => dir,
            Segment::Arc { radius, .. } => C64::new(0.0, radius) * C64::from_polar(1.0, t),
        }
    }

    /// Arc length of the segment.
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { t0, t1, .. } => (t1 - t0).abs(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    /// Length of the parameter interval per unit arc length.
    fn param_per_length(&self) -> f64 {
        match *self {
            Segment::Line { .. } => 1.0,
            Segment::Arc { radius, .. } => 1.0 / radius,
        }
    }

    pub fn start(&self) -> C64 {
        self.point(self.range().0)
    }

    pub fn end(&self) -> C64 {
        self.point(self.range().1)
    }

    /// The same piece traversed backwards.
    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { start, dir, t0, t1 } => {
                Segment::Line { start: start + dir * t1, dir: -dir, t0: 0.0, t1: t1 - t0 }
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                Segment::Arc { center, radius, theta0: theta1, theta1: theta0 }
            }
        }
    }

    /// Splits at parameter `t` strictly inside the range.
    pub fn split(&self, t: f64) -> (Self, Self) {
        match *self {
            Segment::Line { start, dir, t0, t1 } => {
                (Segment::Line { start, dir, t0, t1: t }, Segment::Line { start, dir, t0: t, t1 })
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                (Segment::Arc { center, radius, theta0, theta1: t }, Segment::Arc { center, radius, theta0: t, theta1 })
            }
        }
    }
}

/// A piecewise path in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    pub segments: Vec<Segment>,
    pub label: String,
    /// Truncation bound of infinite rays, if any.
    pub truncation: Option<f64>,
}

impl ContourSpec {
    pub fn new(label: impl Into<String>) -> Self {
        Self { segments: Vec::new(), label: label.into(), truncation: None }
    }

    pub fn with_segment(mut self, s: Segment) -> Self {
        self.segments.push(s);
        self
    }

    /// Polyline through the given vertices.
    pub fn polyline(label: impl Into<String>, pts: &[C64]) -> Self {
        let mut c = Self::new(label);
        for w in pts.windows(2) {
            c.segments.push(Segment::line(w[0], w[1]));
        }
        c
    }

    /// Full circle as four quarter arcs, counter-clockwise.
    pub fn circle(center: C64, radius: f64) -> Self {
        let mut c = Self::new("circle");
        for j in 0..4 {
            let a = j as f64 * PI / 2.0;
            c.segments.push(Segment::arc(center, radius, a, a + PI / 2.0));
        }
        c
    }

    pub fn start(&self) -> Option<C64> {
        self.segments.first().map(|s| s.start())
    }

    pub fn end(&self) -> Option<C64> {
        self.segments.last().map(|s| s.end())
    }

    /// Consecutive segments meet end-to-start within `tol`.
    pub fn is_connected(&self, tol: f64) -> bool {
        self.segments.windows(2).all(|w| (w[0].end() - w[1].start()).norm() <= tol)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            label: format!("{} (reversed)", self.label),
            truncation: self.truncation,
        }
    }

    /// Splits segment `index` at parameter `t`.
    pub fn split_segment(&self, index: usize, t: f64) -> Self {
        let mut out = self.clone();
        let (a, b) = out.segments[index].split(t);
        out.segments[index] = a;
        out.segments.insert(index + 1, b);
        out
    }

    /// Composite Gauss-Legendre rule whose panel length at a point `z` is
    /// at most `max_len(z)`.
    pub fn rule(&self, order: usize, max_len: impl Fn(C64) -> f64) -> ContourRule {
        let g = gauss_legendre(order);
        let mut rule = ContourRule::default();
        for seg in &self.segments {
            let (t0, t1) = seg.range();
            let span = t1 - t0;
            if span == 0.0 {
                continue;
            }
            let sign = span.signum();
            let scale = seg.param_per_length();
            let mut t = t0;
            while (t1 - t) * sign > 0.0 {
                let h0 = max_len(seg.point(t)) * scale;
                let probe = t + sign * h0.min((t1 - t).abs());
                let h = h0.min(max_len(seg.point(probe)) * scale).max(1e-12 * span.abs());
                let mut next = t + sign * h;
                if (t1 - next) * sign < 0.25 * h {
                    next = t1;
                }
                let mid = 0.5 * (t + next);
                let half = 0.5 * (next - t);
                for (x, w) in g.nodes.iter().zip(&g.weights) {
                    let s = mid + half * x;
                    rule.nodes.push(seg.point(s));
                    rule.weights.push(seg.derivative(s) * (half * w));
                }
                t = next;
            }
        }
        rule
    }
}

/// Nodes and complex weights of a fixed quadrature rule on a contour.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ContourRule {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

impl ContourRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j f(z_j)`.
    pub fn apply(&self, mut f: impl FnMut(C64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }
}

/// Tolerances and refinement limits of the adaptive engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinement_depth: u32,
    pub panel_order: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-12, max_refinement_depth: 40, panel_order: 12 }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_refinement_depth < 1 || self.panel_order < 2 {
            return Err(Error::InvalidParameter("depth must be >= 1 and panel order >= 2".into()));
        }
        Ok(())
    }
}

/// Value of a contour integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_CACHED_ORDER: usize = 128;

/// Gauss-Legendre rule of order `n`, computed once per order by Newton iteration.
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    static CACHE: OnceLock<Vec<OnceLock<GaussRule>>> = OnceLock::new();
    assert!((1..=MAX_CACHED_ORDER).contains(&n), "unsupported Gauss order {n}");
    let table = CACHE.get_or_init(|| (0..=MAX_CACHED_ORDER).map(|_| OnceLock::new()).collect());
    table[n].get_or_init(|| compute_gauss_legendre(n))
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

struct Panel {
    seg: usize,
    a: f64,
    b: f64,
    depth: u32,
    value: C64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.seg.cmp(&self.seg))
    }
}

const MAX_PANELS: usize = 200_000;

/// Adaptive integral of `f` along `contour`.
///
/// Each panel is integrated with `n` and `2n` Gauss points; the difference
/// is the panel error. The panel with the largest error is bisected until
/// the total error is below `max(abs_tol, rel_tol·|value|)` or the
/// roundoff floor of the integrand.
pub fn integrate(mut f: impl FnMut(C64) -> C64, contour: &ContourSpec, cfg: &QuadConfig) -> Result<Integral> {
    cfg.validate()?;
    let lo = gauss_legendre(cfg.panel_order);
    let hi = gauss_legendre(2 * cfg.panel_order);
    let mut evaluations = 0usize;
    let mut eval_panel = |seg: &Segment, a: f64, b: f64, f: &mut dyn FnMut(C64) -> C64| {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut v_lo = C64::new(0.0, 0.0);
        let mut v_hi = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (x, w) in lo.nodes.iter().zip(&lo.weights) {
            let t = mid + half * x;
            v_lo += f(seg.point(t)) * seg.derivative(t) * (half * w);
        }
        for (x, w) in hi.nodes.iter().zip(&hi.weights) {
            let t = mid + half * x;
            let term = f(seg.point(t)) * seg.derivative(t) * (half * w);
            abs += term.norm();
            v_hi += term;
        }
        evaluations += lo.nodes.len() + hi.nodes.len();
        (v_hi, (v_hi - v_lo).norm(), abs)
    };

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for (si, seg) in contour.segments.iter().enumerate() {
        let (t0, t1) = seg.range();
        if t0 == t1 {
            continue;
        }
        let pieces = ((seg.length()).ceil() as usize).clamp(2, 64);
        for j in 0..pieces {
            let a = t0 + (t1 - t0) * j as f64 / pieces as f64;
            let b = t0 + (t1 - t0) * (j + 1) as f64 / pieces as f64;
            let (value, error, abs) = eval_panel(seg, a, b, &mut f);
            heap.push(Panel { seg: si, a, b, depth: 0, value, error, abs });
        }
    }

    loop {
        let (value, error, abs) = heap
            .iter()
            .chain(frozen.iter())
            .fold((C64::new(0.0, 0.0), 0.0, 0.0), |(v, e, a), p| (v + p.value, e + p.error, a + p.abs));
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Accuracy { estimate: value, error: f64::INFINITY });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.norm()).max(64.0 * f64::EPSILON * abs);
        if error <= target {
            return Ok(Integral { value, error, evaluations });
        }
        let Some(p) = heap.pop() else {
            return Err(Error::Accuracy { estimate: value, error });
        };
        if p.depth >= cfg.max_refinement_depth || heap.len() + frozen.len() > MAX_PANELS {
            frozen.push(p);
            continue;
        }
        let seg = &contour.segments[p.seg];
        let m = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, m), (m, p.b)] {
            let (value, error, abs) = eval_panel(seg, a, b, &mut f);
            heap.push(Panel { seg: p.seg, a, b, depth: p.depth + 1, value, error, abs });
        }
    }
}

/// The horizontal line `Im t = δ`, `|Re t| ≤ T`, which avoids the poles of
/// the dilogarithm integrand for the given `b`.
pub fn shifted_line(delta: f64, t: f64, b: f64) -> Result<ContourSpec> {
    let limit = (2.0 * PI * b).min(2.0 * PI / b);
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, {limit})")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("truncation T = {t} must be positive")));
    }
    let mut c = ContourSpec::new("gamma-line").with_segment(Segment::line(C64::new(-t, delta), C64::new(t, delta)));
    c.truncation = Some(t);
    Ok(c)
}

/// Truncation `T` of a ray on which the integrand decays like `e^{-πt²}`,
/// chosen so that `e^{-πT²} ≤ abs_tol/10`.
pub fn gaussian_ray_truncation(abs_tol: f64) -> f64 {
    ((10.0 / abs_tol).ln() / PI).sqrt()
}

/// The three-piece contour `L`: a ray descending to the left at angle `π/4`
/// from `-A + iσ`, the horizontal segment at height `σ` from `-A` to `A`, and
/// a ray descending to the right at angle `-π/4`, with `A = |Re k| + 1`.
pub fn kashaev_l(k: C64, params: &LatticeParams, sigma: f64, t: f64) -> Result<ContourSpec> {
    let (lo, hi) = (params.abs_omega(), params.abs_omega_dprime());
    if !(sigma > lo && sigma < hi) {
        return Err(Error::Domain(format!("sigma = {sigma} must lie in ({lo}, {hi})")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("truncation T = {t} must be positive")));
    }
    let a = k.re.abs() + 1.0;
    let left = C64::new(-a, sigma);
    let right = C64::new(a, sigma);
    let mut c = ContourSpec::new("kashaev-L")
        .with_segment(Segment::ray(left, C64::from_polar(1.0, PI / 4.0), -t, 0.0))
        .with_segment(Segment::line(left, right))
        .with_segment(Segment::ray(right, C64::from_polar(1.0, -PI / 4.0), 0.0, t));
    c.truncation = Some(t);
    Ok(c)
}
