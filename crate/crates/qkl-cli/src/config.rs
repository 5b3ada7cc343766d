use crate::CliError;
use clap::{Parser, ValueEnum};
use qkl::cmath::c;
use qkl::C64;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Gamma,
    Phi,
    Jost,
    Resolvent,
    Transform,
    Scattering,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gamma => "gamma",
            Command::Phi => "phi",
            Command::Jost => "jost",
            Command::Resolvent => "resolvent",
            Command::Transform => "transform",
            Command::Scattering => "scattering",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Tables of γ, φ, f±, R, S and 𝒰ψ, and the verification suites.
#[derive(Debug, Clone, Parser)]
#[command(name = "qkl", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Deformation parameter b > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Spectral parameter, "re[,im]".
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Single evaluation point, "re[,im]".
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Second kernel argument for `resolvent`, "re[,im]".
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Sweep "start:stop:count" over x (over k for `scattering` and `transform`).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Reconstruction points for `transform`, "start:stop:count".
    #[arg(long, allow_hyphen_values = true)]
    pub recon: Option<String>,
    /// Test function for `transform`: "gaussian" or "poly:c0,c1,..." times e^{-x^2}.
    #[arg(long)]
    pub psi: Option<String>,
    /// Lower bound applied to every pass threshold in `verify`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for the random points in `verify`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run only this suite (1-9) in `verify`.
    #[arg(long)]
    pub suite: Option<usize>,
    /// TOML file of defaults, e.g. `b = 1.2` or `k = "0.3,0.1"`; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Parse(format!("grid '{s}' is not start:stop:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let stop = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        Ok(Self { start, stop, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + h * i as f64).collect()
    }
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Parse(format!("'{s}' is not re[,im]"));
    let mut it = s.split(',');
    let re = it.next().ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
    let im = match it.next() {
        Some(v) => v.trim().parse::<f64>().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(c(re, im))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Psi {
    Gaussian,
    Poly(Vec<f64>),
}

impl Psi {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "gaussian" {
            return Ok(Psi::Gaussian);
        }
        let coeffs = s
            .strip_prefix("poly:")
            .ok_or_else(|| CliError::Parse(format!("psi '{s}' is not 'gaussian' or 'poly:c0,c1,...'")))?;
        let v = coeffs
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Parse(format!("bad coefficient '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Psi::Poly(v))
    }

    pub fn label(&self) -> String {
        match self {
            Psi::Gaussian => "gaussian".into(),
            Psi::Poly(v) => format!("poly:{}", v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` means the command's default; for `verify` it keeps the suites' own values.
    pub b: Option<f64>,
    pub k: Option<C64>,
    pub x: Option<C64>,
    pub y: Option<C64>,
    pub grid: Option<Grid>,
    pub recon: Option<Grid>,
    pub psi: Psi,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub suite: Option<usize>,
}

pub const DEFAULT_B: f64 = 1.0;

impl RunConfig {
    pub fn b(&self) -> f64 {
        self.b.unwrap_or(DEFAULT_B)
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => read_config_file(p)?,
            None => toml::Table::new(),
        };
        for key in file.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Parse(format!("unknown config key '{key}'")));
            }
        }
        let pick = |flag: &Option<String>, key: &str| -> Result<Option<String>, CliError> {
            match flag {
                Some(v) => Ok(Some(v.clone())),
                None => file.get(key).map(value_string).transpose(),
            }
        };
        let num = |flag: Option<f64>, key: &str| -> Result<Option<f64>, CliError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file
                    .get(key)
                    .map(|v| {
                        value_string(v)?
                            .parse::<f64>()
                            .map_err(|_| CliError::Parse(format!("config key '{key}' is not a number")))
                    })
                    .transpose(),
            }
        };
        let int = |flag: Option<u64>, key: &str| -> Result<Option<u64>, CliError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file
                    .get(key)
                    .map(|v| {
                        value_string(v)?
                            .parse::<u64>()
                            .map_err(|_| CliError::Parse(format!("config key '{key}' is not an integer")))
                    })
                    .transpose(),
            }
        };
        let format = match (cli.format, pick(&None, "format")?) {
            (Some(f), _) => f,
            (None, Some(s)) => {
                Format::from_str(&s, true).map_err(|_| CliError::Parse(format!("unknown format '{s}'")))?
            }
            (None, None) => Format::Json,
        };
        let out = match (&cli.out, pick(&None, "out")?) {
            (Some(p), _) => Some(p.clone()),
            (None, s) => s.map(PathBuf::from),
        };
        let b = num(cli.b, "b")?;
        let tol = num(cli.tol, "tol")?;
        if let Some(t) = tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Parse(format!("tol = {t} must be positive")));
            }
        }
        let suite = int(cli.suite.map(|s| s as u64), "suite")?.map(|s| s as usize);
        if let Some(s) = suite {
            if !(1..=qkl::verify::SUITE_NAMES.len()).contains(&s) {
                return Err(CliError::Parse(format!("suite {s} does not exist")));
            }
        }
        Ok(Self {
            command: cli.command,
            b,
            k: pick(&cli.k, "k")?.as_deref().map(parse_complex).transpose()?,
            x: pick(&cli.x, "x")?.as_deref().map(parse_complex).transpose()?,
            y: pick(&cli.y, "y")?.as_deref().map(parse_complex).transpose()?,
            grid: pick(&cli.grid, "grid")?.as_deref().map(Grid::parse).transpose()?,
            recon: pick(&cli.recon, "recon")?.as_deref().map(Grid::parse).transpose()?,
            psi: pick(&cli.psi, "psi")?.as_deref().map(Psi::parse).transpose()?.unwrap_or(Psi::Gaussian),
            tol,
            format,
            out,
            seed: int(cli.seed, "seed")?.unwrap_or(qkl::verify::VerifyOptions::default().seed),
            suite,
        })
    }
}

const KNOWN_KEYS: [&str; 12] = ["b", "k", "x", "y", "grid", "recon", "psi", "tol", "format", "out", "seed", "suite"];

fn read_config_file(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| CliError::Parse(format!("config {}: {e}", path.display())))
}

fn value_string(v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(CliError::Parse(format!("unsupported config value {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = Grid::parse("-3:3:61").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 61);
        assert_eq!(p[0], -3.0);
        assert!((p[60] - 3.0).abs() < 1e-15);
        assert_eq!(Grid::parse("1:2:1").unwrap().points(), vec![1.0]);
        assert!(Grid::parse("1:2").is_err());
        assert!(Grid::parse("1:2:0").is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.3").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("-1, 0.5").unwrap(), c(-1.0, 0.5));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn psi_forms() {
        assert_eq!(Psi::parse("gaussian").unwrap(), Psi::Gaussian);
        assert_eq!(Psi::parse("poly:1,0.5").unwrap(), Psi::Poly(vec![1.0, 0.5]));
        assert!(Psi::parse("sin").is_err());
    }
}
