//! Library side of the `qkl` command-line tool: configuration, dispatch and
//! JSON/CSV rendering.

pub mod config;
pub mod output;

use config::{Command, Format, Grid, Psi, RunConfig};
use output::{Cell, Column, Report, Section};
use qkl::classical_bessel::KlConfig;
use qkl::cmath::c;
use qkl::qdilog::{ln_gamma, strip_delta};
use qkl::resolvent::{Resolvent, DIAGONAL_THRESHOLD};
use qkl::spectral_transform::{scattering_s, transform_scale, SpectralTransform, TransformConfig};
use qkl::testfunctions::TestFunction;
use qkl::verify::{run_suite, VerifyOptions, SUITE_NAMES};
use qkl::wavefunctions::{WaveContext, POLE_CLEARANCE};
use qkl::{LatticeParams, QuadConfig, C64};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Precondition(#[from] qkl::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) | CliError::Io(_) => 3,
        }
    }
}

const GAMMA_GRID: Grid = Grid { start: -2.0, stop: 2.0, count: 41 };
const X_GRID: Grid = Grid { start: -3.0, stop: 3.0, count: 61 };
const K_GRID: Grid = Grid { start: 0.1, stop: 2.0, count: 20 };
const TRANSFORM_K_GRID: Grid = Grid { start: 0.1, stop: 3.0, count: 30 };
const RECON_GRID: Grid = Grid { start: -2.0, stop: 2.0, count: 9 };

/// Runs the command and returns its report; `report.pass` is false only for failed checks.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report =
        Report { command: cfg.command.name(), provenance: provenance(cfg)?, sections: Vec::new(), pass: true };
    match cfg.command {
        Command::Gamma => gamma(cfg, &mut report)?,
        Command::Phi => phi(cfg, &mut report)?,
        Command::Jost => jost(cfg, &mut report)?,
        Command::Resolvent => resolvent(cfg, &mut report)?,
        Command::Transform => transform(cfg, &mut report)?,
        Command::Scattering => scattering(cfg, &mut report)?,
        Command::Verify => verify(cfg, &mut report),
    }
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(output::to_json(report)),
        Format::Csv => output::to_csv(report),
    }
}

/// Parses, runs and writes; returns the process exit code.
pub fn execute(cli: &config::Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    if let Some(b) = cfg.b {
        LatticeParams::new(b)?;
    }
    let report = run(&cfg)?;
    let text = render(&report, cfg.format)?;
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn provenance(cfg: &RunConfig) -> Result<Vec<(String, Cell)>, CliError> {
    let p = LatticeParams::new(cfg.b())?;
    let w = WaveContext::new(p);
    let q = QuadConfig::default();
    let t = TransformConfig::default();
    let mut v: Vec<(String, Cell)> = vec![
        ("version".into(), Cell::Text(env!("CARGO_PKG_VERSION").into())),
        ("b".into(), Cell::Real(p.b)),
        ("sigma".into(), Cell::Real(w.sigma)),
        ("strip_delta".into(), Cell::Real(strip_delta(&p))),
        ("k_exclusion".into(), Cell::Real(w.k_exclusion)),
        ("pole_clearance".into(), Cell::Real(POLE_CLEARANCE)),
        ("quad_abs_tol".into(), Cell::Real(q.abs_tol)),
        ("quad_rel_tol".into(), Cell::Real(q.rel_tol)),
        ("transform_k_max".into(), Cell::Real(t.k_max)),
        ("transform_k_panel".into(), Cell::Real(t.k_panel)),
        ("transform_k_order".into(), Cell::Int(t.k_order as u64)),
        ("kl_k_max".into(), Cell::Real(KlConfig::default().k_max)),
        ("diagonal_threshold".into(), Cell::Real(DIAGONAL_THRESHOLD)),
        ("seed".into(), Cell::Int(cfg.seed)),
        ("tol_floor".into(), cfg.tol.map_or(Cell::Text("none".into()), Cell::Real)),
    ];
    if let Some(k) = cfg.k {
        v.push(("k".into(), Cell::Complex(k)));
    }
    if cfg.command == Command::Transform {
        v.push(("psi".into(), Cell::Text(cfg.psi.label())));
    }
    Ok(v)
}

fn need_k(cfg: &RunConfig) -> Result<C64, CliError> {
    cfg.k.ok_or_else(|| CliError::Parse(format!("{} needs --k", cfg.command.name())))
}

fn x_points(cfg: &RunConfig, default: Grid) -> Vec<C64> {
    match (cfg.x, cfg.grid) {
        (Some(x), None) => vec![x],
        (_, g) => g.unwrap_or(default).points().into_iter().map(|x| c(x, 0.0)).collect(),
    }
}

fn context(cfg: &RunConfig) -> Result<WaveContext, CliError> {
    Ok(WaveContext::new(LatticeParams::new(cfg.b())?))
}

fn gamma(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let p = LatticeParams::new(cfg.b())?;
    let mut s = Section::new("gamma", vec![Column::complex("z"), Column::complex("gamma")]);
    for z in x_points(cfg, GAMMA_GRID) {
        s.rows.push(vec![Cell::Complex(z), Cell::Complex(ln_gamma(z, &p)?.exp())]);
    }
    r.sections.push(s);
    Ok(())
}

fn phi(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let w = context(cfg)?;
    let k = need_k(cfg)?;
    let xs = x_points(cfg, X_GRID);
    let v = w.phi_many(&xs, k)?;
    let mut s = Section::new("phi", vec![Column::complex("x"), Column::complex("phi")]);
    for (x, f) in xs.iter().zip(v) {
        s.rows.push(vec![Cell::Complex(*x), Cell::Complex(f)]);
    }
    r.sections.push(s);
    Ok(())
}

fn jost(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let w = context(cfg)?;
    let k = need_k(cfg)?;
    let xs = x_points(cfg, X_GRID);
    let fp = w.jost_many(&xs, k, 1.0)?;
    let fm = w.jost_many(&xs, k, -1.0)?;
    let mut s = Section::new("jost", vec![Column::complex("x"), Column::complex("f_plus"), Column::complex("f_minus")]);
    for ((x, a), b) in xs.iter().zip(fp).zip(fm) {
        s.rows.push(vec![Cell::Complex(*x), Cell::Complex(a), Cell::Complex(b)]);
    }
    r.sections.push(s);
    Ok(())
}

fn resolvent(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let w = context(cfg)?;
    let pt = w.params.spectral_point(need_k(cfg)?)?;
    let res = Resolvent::new(&w, &pt)?;
    let y = cfg.y.unwrap_or(c(0.0, 0.0));
    let xs = x_points(cfg, X_GRID);
    let v = res.row(y, &xs)?;
    r.provenance.push(("lambda".into(), Cell::Complex(pt.lambda)));
    r.provenance.push(("y".into(), Cell::Complex(y)));
    let mut s = Section::new("resolvent", vec![Column::complex("x"), Column::complex("R")]);
    for (x, k) in xs.iter().zip(v) {
        s.rows.push(vec![Cell::Complex(*x), Cell::Complex(k)]);
    }
    r.sections.push(s);
    Ok(())
}

fn k_points(cfg: &RunConfig, default: Grid) -> Result<Vec<f64>, CliError> {
    match (cfg.k, cfg.grid) {
        (Some(k), None) => {
            if k.im != 0.0 {
                return Err(CliError::Parse(format!("{} needs real k", cfg.command.name())));
            }
            Ok(vec![k.re])
        }
        (_, g) => Ok(g.unwrap_or(default).points()),
    }
}

fn scattering(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let w = context(cfg)?;
    let mut s = Section::new(
        "scattering",
        vec![Column::real("k"), Column::complex("S"), Column::real("abs_S"), Column::complex("M")],
    );
    for k in k_points(cfg, K_GRID)? {
        let sv = scattering_s(k, &w.params, w.k_exclusion)?;
        let m = w.coeff_m(c(k, 0.0))?;
        s.rows.push(vec![Cell::Real(k), Cell::Complex(sv), Cell::Real(sv.norm()), Cell::Complex(m)]);
    }
    r.sections.push(s);
    Ok(())
}

fn test_function(psi: &Psi) -> TestFunction {
    match psi {
        Psi::Gaussian => TestFunction::gaussian(),
        Psi::Poly(c) => TestFunction::poly_gaussian(c),
    }
}

fn transform(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let w = context(cfg)?;
    let psi = test_function(&cfg.psi);
    let ks = k_points(cfg, TRANSFORM_K_GRID)?;
    let probe = SpectralTransform::at_points(w, &ks, transform_scale(&psi, &w.params))?;
    let u = probe.forward(&psi)?;
    let mut fwd = Section::new("forward", vec![Column::real("k"), Column::complex("U")]);
    for (k, v) in ks.iter().zip(&u.values) {
        fwd.rows.push(vec![Cell::Real(*k), Cell::Complex(*v)]);
    }

    let t = SpectralTransform::for_functions(w, TransformConfig::default(), &[&psi])?;
    let coeffs = t.forward(&psi)?;
    let xs = cfg.recon.unwrap_or(RECON_GRID).points();
    let back = t.inverse(&coeffs, &xs)?;
    let mut rec = Section::new(
        "reconstruction",
        vec![Column::real("x"), Column::complex("psi_reconstructed"), Column::complex("psi"), Column::real("error")],
    );
    for (x, v) in xs.iter().zip(&back.values) {
        let exact = psi.eval(c(*x, 0.0));
        rec.rows.push(vec![Cell::Real(*x), Cell::Complex(*v), Cell::Complex(exact), Cell::Real((v - exact).norm())]);
    }

    let mut sum = Section::new("summary", vec![Column::other("quantity"), Column::real("value")]);
    let norm = psi.l2_norm_sq(&QuadConfig::default())?;
    let spectral = t.spectral_norm_sq(&coeffs);
    let round_trip = rec.rows.iter().map(|row| if let Cell::Real(e) = row[3] { e } else { 0.0 }).fold(0.0, f64::max);
    for (name, v) in [
        ("norm_sq", norm),
        ("spectral_norm_sq", spectral),
        ("parseval_gap", (norm - spectral).abs() / norm),
        ("round_trip_error", round_trip),
        ("tail_estimate", t.tail_estimate(&coeffs)),
    ] {
        sum.rows.push(vec![Cell::Text(name.into()), Cell::Real(v)]);
    }
    r.sections.extend([fwd, rec, sum]);
    Ok(())
}

fn verify(cfg: &RunConfig, r: &mut Report) {
    let opts = VerifyOptions { b_values: cfg.b.map(|b| vec![b]), seed: cfg.seed, tol_floor: cfg.tol };
    let ids: Vec<usize> = match cfg.suite {
        Some(s) => vec![s],
        None => (1..=SUITE_NAMES.len()).collect(),
    };
    let mut suites = Section::new(
        "suites",
        vec![
            Column::other("suite"),
            Column::other("name"),
            Column::real("max_residual"),
            Column::other("worst_check"),
            Column::other("pass"),
        ],
    );
    let mut checks = Section::new(
        "checks",
        vec![
            Column::other("suite"),
            Column::other("check"),
            Column::real("value"),
            Column::real("tol"),
            Column::other("pass"),
        ],
    );
    for id in ids {
        let rep = run_suite(id, &opts);
        let worst = match (&rep.error, rep.worst()) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(w)) => w.name.clone(),
            (None, None) => String::new(),
        };
        suites.rows.push(vec![
            Cell::Int(id as u64),
            Cell::Text(rep.name.into()),
            Cell::Real(rep.max_residual()),
            Cell::Text(worst),
            Cell::Bool(rep.pass()),
        ]);
        for ch in &rep.checks {
            checks.rows.push(vec![
                Cell::Int(id as u64),
                Cell::Text(ch.name.clone()),
                Cell::Real(ch.value),
                Cell::Real(ch.tol),
                Cell::Bool(ch.pass()),
            ]);
        }
        r.pass &= rep.pass();
    }
    r.sections.extend([suites, checks]);
}
