use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use nagaolab::sato_tate::DEFAULT_TOLERANCE;
use nagaolab::twist_surface::{geometric_grid, DEFAULT_N_CAP};
use nagaolab::{parse_mobius, parse_polynomial, Error, FiberMode, IntPolynomial, MobiusTransform};

use crate::CliError;

/// Environment variable that overrides `--cache-dir`.
pub const CACHE_ENV: &str = "NAGAOLAB_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Frobenius traces a_p for good p <= N (or at --p).
    Trace,
    /// Genus-2 L-polynomial coefficients (a_p, b_p).
    Lpoly,
    /// Nagao sums S1, S2 for D(T) y^2 = f(x) on a grid of cutoffs.
    Nagao,
    /// Second/fourth moments, zero fraction and KS distances.
    Moments,
    /// Moment class, candidate groups and predicted rank.
    StClassify,
    /// Twisting polynomial D for f and a root-permuting Möbius map.
    Peterson,
    /// Trace-identity check a_p(J_D) = r a_p(f) + sum a_p(E_i).
    FactorCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeArg {
    #[default]
    FastTwist,
    Fiberwise,
}

impl From<ModeArg> for FiberMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::FastTwist => FiberMode::FastTwist,
            ModeArg::Fiberwise => FiberMode::Fiberwise,
        }
    }
}

#[derive(Parser, Debug, Clone)]
#[command(
    name = "nagaolab",
    version,
    about = "Frobenius trace, Nagao sum and Sato-Tate experiments"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,

    /// Curve polynomial f, e.g. "x^5 - x + 1".
    #[arg(long = "f", allow_hyphen_values = true)]
    pub f: String,

    /// Twisting polynomial D(T), or "auto-peterson".
    #[arg(long = "D", allow_hyphen_values = true)]
    pub d: Option<String>,

    /// Möbius transform, e.g. "1/x" or "(x+1)/(-3x+1)".
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,

    /// Cutoff N.
    #[arg(long = "N", default_value_t = 100_000)]
    pub n: u64,

    /// Single prime for trace / lpoly.
    #[arg(long)]
    pub p: Option<u64>,

    /// "geometric:k" or a comma-separated list of cutoffs.
    #[arg(long, default_value = "geometric:20")]
    pub grid: String,

    #[arg(long, value_enum, default_value_t = ModeArg::FastTwist)]
    pub mode: ModeArg,

    /// Multiplicity r for factor-check.
    #[arg(long, default_value_t = 1)]
    pub r: i64,

    /// Extra genus-1 factor for factor-check; repeatable.
    #[arg(long = "s-curve", allow_hyphen_values = true)]
    pub s_curve: Vec<String>,

    /// Moment-class half-width for st-classify.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Alternative Sato-Tate group table.
    #[arg(long)]
    pub st_table: Option<PathBuf>,

    #[arg(long, default_value_t = 1)]
    pub threads: usize,

    #[arg(long)]
    pub cache_dir: Option<PathBuf>,

    /// Recompute every cached trace and reject the cache on any mismatch.
    #[arg(long)]
    pub verify_cache: bool,

    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    Geometric(usize),
    List(Vec<u64>),
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        if let Some(k) = text.strip_prefix("geometric:") {
            let k = k
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad grid size in '{}'", text)))?;
            if k == 0 {
                return Err(CliError::Config("grid needs at least one point".into()));
            }
            return Ok(GridSpec::Geometric(k));
        }
        let list = text
            .split(',')
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Config(format!("bad grid '{}'", text)))?;
        Ok(GridSpec::List(list))
    }

    /// Cutoffs for a sweep to `n`.
    pub fn points(&self, n: u64) -> Vec<u64> {
        match self {
            GridSpec::Geometric(k) => geometric_grid(*k, 1000.min(n), n),
            GridSpec::List(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistSource {
    Poly(IntPolynomial),
    AutoPeterson,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub f: IntPolynomial,
    pub d: Option<TwistSource>,
    pub sigma: Option<MobiusTransform>,
    pub n: u64,
    pub p: Option<u64>,
    pub grid: GridSpec,
    pub mode: FiberMode,
    pub r: i64,
    pub s_curves: Vec<IntPolynomial>,
    pub tolerance: f64,
    pub st_table: Option<PathBuf>,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    pub verify_cache: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// A config with defaults for everything but the command and curve.
    pub fn new(command: Command, f: IntPolynomial) -> Self {
        ExperimentConfig {
            command,
            f,
            d: None,
            sigma: None,
            n: 100_000,
            p: None,
            grid: GridSpec::Geometric(20),
            mode: FiberMode::FastTwist,
            r: 1,
            s_curves: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
            st_table: None,
            threads: 1,
            cache_dir: None,
            verify_cache: false,
            output: None,
            format: Format::Csv,
        }
    }

    /// Builds and validates a config; `env_cache` is the value of
    /// `NAGAOLAB_CACHE`, if set.
    pub fn from_args(args: Args, env_cache: Option<PathBuf>) -> Result<Self, CliError> {
        let f = parse_polynomial(&args.f)?;
        let d = match args.d.as_deref().map(str::trim) {
            None => None,
            Some("auto-peterson") => Some(TwistSource::AutoPeterson),
            Some(text) => Some(TwistSource::Poly(parse_polynomial(text)?)),
        };
        let sigma = args.sigma.as_deref().map(parse_mobius).transpose()?;
        let s_curves = args
            .s_curve
            .iter()
            .map(|s| parse_polynomial(s))
            .collect::<Result<Vec<_>, _>>()?;
        let config = ExperimentConfig {
            command: args.command,
            f,
            d,
            sigma,
            n: args.n,
            p: args.p,
            grid: GridSpec::parse(&args.grid)?,
            mode: args.mode.into(),
            r: args.r,
            s_curves,
            tolerance: args.tolerance,
            st_table: args.st_table,
            threads: args.threads,
            cache_dir: env_cache.or(args.cache_dir),
            verify_cache: args.verify_cache,
            output: args.output,
            format: args.format,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        if self.n > DEFAULT_N_CAP {
            return Err(Error::CapExceeded {
                what: "cutoff N",
                p: self.n,
                cap: DEFAULT_N_CAP,
            }
            .into());
        }
        if self.n < 2 {
            return Err(CliError::Config("--N must be at least 2".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Config("--tolerance must be positive".into()));
        }
        if self.d == Some(TwistSource::AutoPeterson) && self.sigma.is_none() {
            return Err(CliError::Config("--D auto-peterson needs --sigma".into()));
        }
        Ok(())
    }
}
