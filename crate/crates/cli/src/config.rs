use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use spectral_envelope::envelope::{base_spectrum, Method};
use spectral_envelope::spectra::TrialFamily;
use spectral_envelope::{Mode, PotentialShape, PowerLawSpectrum, QuantumNumbers, Tolerance};

use crate::CliError;

pub const TOL_ENV: &str = "SPECTRAL_ENVELOPE_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "spectral-envelope",
    version,
    about = "Envelope, kinetic-potential and local-energy bounds for -Δ + v f(r)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds at one coupling or a list of couplings.
    Bound(RunArgs),
    /// Lower bound, upper bound, oracle and coincidence gap over a coupling grid.
    Sweep(RunArgs),
    /// Shooting-method eigenvalues.
    Oracle(RunArgs),
    /// Cross-checks between the bound constructions and the oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Line,
    Radial,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Line => Mode::Line,
            ModeArg::Radial => Mode::Radial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Tangent,
    Kinetic,
    Semiclassical,
    Local,
    /// Tangent, kinetic and local.
    All,
}

impl MethodArg {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Tangent => vec![Method::TangentEnvelope],
            MethodArg::Kinetic => vec![Method::KineticEnvelope],
            MethodArg::Semiclassical => vec![Method::Semiclassical],
            MethodArg::Local => vec![Method::LocalEnergy],
            MethodArg::All => vec![
                Method::TangentEnvelope,
                Method::KineticEnvelope,
                Method::LocalEnergy,
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputArg {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "radial")]
    pub mode: ModeArg,
    /// Potential shape as comma-separated `coeff:exponent` terms, e.g. `-1:-1,1:2`.
    #[arg(long, allow_hyphen_values = true)]
    pub potential: Option<String>,
    /// Base potential `coeff:exponent`; repeat for several bases. Defaults to
    /// `1:2` on the line and to both `-1:-1` and `1:2` in radial mode.
    #[arg(long, allow_hyphen_values = true)]
    pub base: Vec<String>,
    #[arg(long, default_value_t = 3)]
    pub d: u32,
    #[arg(long = "l", default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// Coupling: a number, a list `a,b,c`, or a geometric grid `lo:hi:count`.
    #[arg(long, default_value = "1")]
    pub v: String,
    #[arg(long, value_enum, default_value = "tangent")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputArg,
    /// Optimizer tolerance; overrides SPECTRAL_ENVELOPE_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// coincidence, roundtrip, sandwich, scaling, invariance or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, value_enum, default_value = "table")]
    pub output: OutputArg,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Couplings from `x`, `a,b,c` or `lo:hi:count` (geometric).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    let bad = |why: &str| CliError::Config(format!("invalid coupling grid `{spec}`: {why}"));
    let number = |s: &str| -> Result<f64, CliError> {
        let x: f64 = s
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{}` is not a number", s.trim())))?;
        if x > 0.0 && x.is_finite() {
            Ok(x)
        } else {
            Err(bad("couplings must be positive and finite"))
        }
    };
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(bad("expected lo:hi:count"));
        };
        let (lo, hi) = (number(lo)?, number(hi)?);
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| bad("count must be a positive integer"))?;
        match count {
            0 => return Err(bad("count must be a positive integer")),
            1 => vec![lo],
            _ if lo >= hi => return Err(bad("need lo < hi")),
            _ => spectral_envelope::numerics::geometric_grid(lo, hi, count),
        }
    } else {
        spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("couplings must be strictly increasing"));
    }
    Ok(grid)
}

/// `--tol`, else the environment variable, else the library default.
pub fn resolve_tolerance(flag: Option<f64>) -> Result<Tolerance, CliError> {
    let from_env = match std::env::var(TOL_ENV) {
        Ok(s) if !s.trim().is_empty() => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{TOL_ENV}=`{s}` is not a number")))?,
        ),
        _ => None,
    };
    match flag.or(from_env) {
        None => Ok(Tolerance::default()),
        Some(x) => {
            let d = Tolerance::default();
            Tolerance::new(x, d.abs_f, d.max_iter)
                .map_err(|_| CliError::Config(format!("tolerance must be positive, got {x}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct Base {
    pub spec: String,
    pub shape: PotentialShape,
    pub spectrum: PowerLawSpectrum,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub potential_spec: String,
    pub potential: PotentialShape,
    pub bases: Vec<Base>,
    pub qn: QuantumNumbers,
    pub couplings: Vec<f64>,
    pub method: MethodArg,
    pub output: OutputArg,
    pub tol: Tolerance,
}

/// Echo of the run configuration in JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: ModeArg,
    pub potential: String,
    pub bases: Vec<String>,
    pub d: u32,
    pub l: u32,
    pub n: u32,
    pub v: Vec<f64>,
    pub method: MethodArg,
    pub tol: f64,
}

impl RunConfig {
    /// `needs_bases` is false for oracle runs.
    pub fn from_args(args: &RunArgs, needs_bases: bool) -> Result<Self, CliError> {
        let mode = Mode::from(args.mode);
        let potential_spec = args.potential.clone().ok_or_else(|| {
            CliError::Config("--potential is required, e.g. --potential 1:4".into())
        })?;
        let potential = PotentialShape::parse(&potential_spec, mode.domain())
            .map_err(|e| CliError::Config(format!("--potential: {e}")))?;
        let qn = match mode {
            Mode::Line => QuantumNumbers::line(args.n),
            Mode::Radial => QuantumNumbers::radial(args.d, args.l, args.n)
                .map_err(|e| CliError::Config(format!("quantum numbers: {e}")))?,
        };
        let couplings = parse_grid(&args.v)?;
        let tol = resolve_tolerance(args.tol)?;
        let bases = if needs_bases {
            let specs: Vec<String> = if args.base.is_empty() {
                match mode {
                    Mode::Line => vec!["1:2".into()],
                    Mode::Radial => vec!["-1:-1".into(), "1:2".into()],
                }
            } else {
                args.base.clone()
            };
            specs
                .into_iter()
                .map(|spec| make_base(spec, qn, args.method))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            mode,
            potential_spec,
            potential,
            bases,
            qn,
            couplings,
            method: args.method,
            output: args.output,
            tol,
        })
    }

    pub fn echo(&self) -> ConfigEcho {
        let (d, l) = match self.mode {
            Mode::Line => (1, 0),
            Mode::Radial => (self.qn.d, self.qn.l),
        };
        ConfigEcho {
            mode: match self.mode {
                Mode::Line => ModeArg::Line,
                Mode::Radial => ModeArg::Radial,
            },
            potential: self.potential_spec.clone(),
            bases: self.bases.iter().map(|b| b.spec.clone()).collect(),
            d,
            l,
            n: self.qn.n,
            v: self.couplings.clone(),
            method: self.method,
            tol: self.tol.abs_x,
        }
    }
}

fn make_base(spec: String, qn: QuantumNumbers, method: MethodArg) -> Result<Base, CliError> {
    let shape = PotentialShape::parse(&spec, qn.mode.domain())
        .map_err(|e| CliError::Config(format!("--base {spec}: {e}")))?;
    let term = shape.as_pure_power().ok_or_else(|| {
        CliError::Config(format!("--base {spec}: a base must be a single power term"))
    })?;
    if method.methods().contains(&Method::LocalEnergy) {
        TrialFamily::for_base(term.exponent, qn.mode).map_err(|_| {
            CliError::Config(format!(
                "--base {spec}: the local method needs a base with known eigenfunctions \
                 (1:2, or -1:-1 in radial mode)"
            ))
        })?;
    }
    let spectrum = base_spectrum(&shape, qn).map_err(|e| match e {
        spectral_envelope::Error::UnsupportedExponent(_)
        | spectral_envelope::Error::InvalidQuantumNumbers(_)
        | spectral_envelope::Error::BaseMismatch(_) => {
            CliError::Config(format!("--base {spec}: {e}"))
        }
        other => CliError::Numeric(format!("--base {spec}: {other}")),
    })?;
    Ok(Base {
        spec,
        shape,
        spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("1, 8").unwrap(), vec![1.0, 8.0]);
        let g = parse_grid("0.25:4:5").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.25);
        assert_eq!(g[4], 4.0);
        assert!((g[2] - 1.0).abs() < 1e-14);
        assert_eq!(parse_grid("2:2:1").unwrap(), vec![2.0]);
        for bad in [
            "", "0", "-1", "2,1", "1,1", "1:2", "1:2:0", "2:1:3", "a", "1:x:3", "nan", "inf",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
