//! Job options shared by every command, read from flags and an optional JSON config.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use tauquant::discretize::Grid;
use tauquant::symbol::ComplexSymbol;
use tauquant::tau::QuantizingFunction;

/// Failure of a command, mapped to an exit code and a one-line code on stderr.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(tauquant::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "E_USAGE",
            Failure::Core(e) => e.code(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<tauquant::Error> for Failure {
    fn from(e: tauquant::Error) -> Self {
        Failure::Core(e)
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

pub fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Job {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Command name; only checked against the subcommand when given in a config.
    #[arg(skip)]
    pub command: Option<String>,

    /// Real part of the symbol, in x1.., k1.. (or x, k when n = 1).
    #[arg(long, allow_hyphen_values = true)]
    pub symbol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub symbol_im: Option<String>,
    /// Second symbol (compose).
    #[arg(long, allow_hyphen_values = true)]
    pub symbol2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub symbol2_im: Option<String>,
    /// Amplitude in x, y, k and w.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude_im: Option<String>,

    /// Quantizing function: kn, akn, weyl, linear:t or expressions in w1.. (comma-separated).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: Option<String>,
    /// Target quantization of a composition (defaults to --tau).
    #[arg(long, allow_hyphen_values = true)]
    pub tau3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<String>,

    /// Grid as n,N,L with L the half-length (`pi` allowed).
    #[arg(long)]
    pub grid: Option<String>,
    /// Dimension when no grid is given.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Expansion order M.
    #[arg(long)]
    pub order: Option<u32>,
    /// Taylor depth N of the quantizing function.
    #[arg(long)]
    pub taylor: Option<u32>,
    /// Symbol order m.
    #[arg(long)]
    pub m: Option<f64>,
    /// Lower Sobolev index s (garding).
    #[arg(long)]
    pub s: Option<f64>,
    /// Ellipticity radius R0.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Number of reduction steps (reduce-amplitude).
    #[arg(long)]
    pub n_red: Option<u32>,

    /// Operator matrix CSV to read.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Grid function CSV to read.
    #[arg(long = "in")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    /// Matrix or grid function CSV to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report to write (stdout when absent).
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Norm method (power, svd) or Heisenberg tau method (closed, integral).
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Half-width of the probe box (check-tau).
    #[arg(long)]
    pub halfwidth: Option<f64>,
    /// Sampling box half-widths x,y,k (cv-bound).
    #[arg(long = "box", allow_hyphen_values = true)]
    #[serde(rename = "box")]
    pub cv_box: Option<String>,

    /// Heisenberg variant: standard or polarised.
    #[arg(long)]
    pub group: Option<String>,
    /// Heisenberg point a,b,c with rational entries.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub point2: Option<String>,
}

macro_rules! prefer {
    ($a:ident, $b:ident; $($f:ident),*) => {
        Job { config: $a.config, $($f: $a.$f.or($b.$f)),* }
    };
}

impl Job {
    /// Flags override the config file.
    pub fn resolve(self, command: &str) -> Outcome<Job> {
        let cfg = match &self.config {
            Some(path) => {
                let text = read_text(path)?;
                let cfg: Job = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
                if let Some(c) = &cfg.command {
                    if c != command {
                        return usage(format!("config is for `{c}`, not `{command}`"));
                    }
                }
                cfg
            }
            None => Job::default(),
        };
        let flags = self;
        Ok(prefer!(flags, cfg; command, symbol, symbol_im, symbol2, symbol2_im, amplitude, amplitude_im,
            tau, tau2, tau3, from, to, grid, dim, order, taylor, m, s, r0, n_red, matrix, input, out,
            report, method, samples, halfwidth, cv_box, group, point, point2))
    }

    pub fn grid(&self) -> Outcome<Option<Grid>> {
        let Some(spec) = &self.grid else { return Ok(None) };
        let g = Grid::parse(spec)?;
        if let Some(d) = self.dim {
            if d != g.n {
                return usage(format!("--dim {d} disagrees with grid dimension {}", g.n));
            }
        }
        Ok(Some(g))
    }

    pub fn need_grid(&self) -> Outcome<Grid> {
        self.grid()?.ok_or_else(|| Failure::Usage("--grid is required".into()))
    }

    pub fn dim(&self) -> Outcome<usize> {
        Ok(match self.grid()? {
            Some(g) => g.n,
            None => self.dim.unwrap_or(1),
        })
    }

    pub fn symbol(&self) -> Outcome<ComplexSymbol> {
        let re = need(&self.symbol, "--symbol")?;
        Ok(ComplexSymbol::parse_symbol(re, self.symbol_im.as_deref(), self.dim()?)?)
    }

    pub fn symbol2(&self) -> Outcome<ComplexSymbol> {
        let re = need(&self.symbol2, "--symbol2")?;
        Ok(ComplexSymbol::parse_symbol(re, self.symbol2_im.as_deref(), self.dim()?)?)
    }

    pub fn amplitude(&self) -> Outcome<ComplexSymbol> {
        let re = need(&self.amplitude, "--amplitude")?;
        Ok(ComplexSymbol::parse_amplitude(re, self.amplitude_im.as_deref(), self.dim()?)?)
    }

    pub fn tau_named(&self, spec: &Option<String>, flag: &str) -> Outcome<QuantizingFunction> {
        Ok(QuantizingFunction::from_spec(need(spec, flag)?, self.dim()?)?)
    }

    pub fn tau(&self) -> Outcome<QuantizingFunction> {
        self.tau_named(&self.tau, "--tau")
    }

    pub fn input_file(&self, path: &Option<PathBuf>, flag: &str) -> Outcome<PathBuf> {
        let p = need(path, flag)?;
        if !p.is_file() {
            return usage(format!("{flag}: no such file {}", p.display()));
        }
        Ok(p.clone())
    }
}

pub fn need<'a, T>(v: &'a Option<T>, flag: &str) -> Outcome<&'a T> {
    v.as_ref().ok_or_else(|| Failure::Usage(format!("{flag} is required")))
}

fn read_text(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Usage("x".into()).exit_code(), 2);
        assert_eq!(Failure::Core(tauquant::Error::Overflow).exit_code(), 2);
        assert_eq!(Failure::Core(tauquant::Error::NonConvergence("svd".into())).exit_code(), 3);
        let newton = tauquant::Error::NewtonFailure { iterations: 50, residual: 1.0 };
        assert_eq!(Failure::Core(newton).code(), "E_NEWTON");
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("job.json");
        std::fs::write(&path, r#"{"symbol": "k", "tau": "weyl", "order": 3}"#).unwrap();
        let flags = Job { config: Some(path), tau: Some("kn".into()), ..Job::default() };
        let j = flags.resolve("convert").unwrap();
        assert_eq!(j.symbol.as_deref(), Some("k"));
        assert_eq!(j.tau.as_deref(), Some("kn"));
        assert_eq!(j.order, Some(3));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("job.json");
        std::fs::write(&path, r#"{"symbl": "k"}"#).unwrap();
        let flags = Job { config: Some(path), ..Job::default() };
        assert!(matches!(flags.resolve("quantize"), Err(Failure::Usage(_))));
    }
}
