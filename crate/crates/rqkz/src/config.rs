use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rqkz_core::repkit::{GradingChoice, SiteKind};
use rqkz_core::rsolve::Normalization;
use rqkz_core::{QContext, C};

use crate::error::CliError;

/// A complex number written as `re,im` or as a bare real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub C);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        match parts.as_slice() {
            [re] => Ok(Self(C::new(num(re)?, 0.0))),
            [re, im] => Ok(Self(C::new(num(re)?, num(im)?))),
            _ => Err(format!("expected `re,im`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Hw,
    Kappa,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    #[value(name = "V,V")]
    VV,
    #[value(name = "V,V*")]
    VVd,
    #[value(name = "V*,V")]
    VdV,
    #[value(name = "V*,V*")]
    VdVd,
}

impl PairArg {
    pub fn kinds(self) -> [SiteKind; 2] {
        use SiteKind::*;
        match self {
            PairArg::VV => [V, V],
            PairArg::VVd => [V, VDual],
            PairArg::VdV => [VDual, V],
            PairArg::VdVd => [VDual, VDual],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    R,
    Rcheck,
}

#[derive(Debug, Parser)]
#[command(
    name = "rqkz",
    version,
    about = "Numerical verification of R-operator and qKZ identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run every check and emit one report array
    Suite,
    /// Run a single check by name (`list` prints the names)
    Verify { check: String },
    /// Dump one R-operator
    Rmat,
    /// Tabulate the closed-form normalization scalars at one point
    Scalars,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Spin of the evaluation representation
    #[arg(long, global = true, default_value_t = 1)]
    pub m: usize,
    /// Rank parameter of the sl(l+1) scalar family
    #[arg(long, global = true, default_value_t = 1)]
    pub l: u32,
    /// Half-chain length of the reduction checks
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,
    /// Deformation parameter as `re,im`
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "0.7,0")]
    pub q: ComplexArg,
    #[arg(long, global = true, default_value_t = 1)]
    pub s0: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub s1: u32,
    /// Twist parameters, comma separated
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        value_delimiter = ',',
        default_value = "0"
    )]
    pub alpha: Vec<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Overrides every check tolerance
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    /// Maximum number of q-Pochhammer factors
    #[arg(long, global = true, default_value_t = 96)]
    pub trunc: usize,
    /// Random samples per check
    #[arg(long, global = true, default_value_t = 3)]
    pub samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = NormArg::Both)]
    pub norm: NormArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Record wall-clock milliseconds in reports
    #[arg(long, global = true)]
    pub timings: bool,
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "1.3,0.4")]
    pub zeta1: ComplexArg,
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "0.9,-0.2")]
    pub zeta2: ComplexArg,
    #[arg(long, global = true, value_enum, default_value = "V,V")]
    pub pair: PairArg,
    #[arg(long, global = true, value_enum, default_value_t = FormArg::Rcheck)]
    pub form: FormArg,
    /// Argument of the scalar table
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "0.5,0.2")]
    pub z: ComplexArg,
}

impl Default for RunArgs {
    fn default() -> Self {
        Cli::parse_from(["rqkz", "suite"]).run
    }
}

/// A validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub m: usize,
    pub l: u32,
    pub n: usize,
    pub ctx: QContext,
    pub grading: GradingChoice,
    pub alphas: Vec<C>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub samples: usize,
    pub norms: Vec<Normalization>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub timings: bool,
    pub zeta1: C,
    pub zeta2: C,
    pub pair: [SiteKind; 2],
    pub form: FormArg,
    pub z: C,
}

pub const MAX_M: usize = 4;
pub const MAX_N: usize = 3;

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Result<Self, CliError> {
        let bad = |s: String| Err(CliError::Config(s));
        if a.m == 0 || a.m > MAX_M {
            return bad(format!("m must lie in 1..={MAX_M}, got {}", a.m));
        }
        if a.l == 0 {
            return bad("l must be positive".into());
        }
        if a.n == 0 || a.n > MAX_N {
            return bad(format!("n must lie in 1..={MAX_N}, got {}", a.n));
        }
        if a.samples == 0 {
            return bad("samples must be positive".into());
        }
        if a.alpha.is_empty() || a.alpha.iter().any(|x| !x.is_finite()) {
            return bad("alpha must be a non-empty list of finite numbers".into());
        }
        if let Some(t) = a.tol {
            if t.is_nan() || t < 0.0 {
                return bad(format!("tol must be non-negative, got {t}"));
            }
        }
        if a.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let ctx = QContext::with_policy(a.q.0, 1e-10, a.trunc, 24)?;
        let grading = GradingChoice::new(a.s0, a.s1)?;
        let norms = match a.norm {
            NormArg::Hw => vec![Normalization::Hw],
            NormArg::Kappa => vec![Normalization::Kappa],
            NormArg::Both => vec![Normalization::Hw, Normalization::Kappa],
        };
        Ok(Self {
            m: a.m,
            l: a.l,
            n: a.n,
            ctx,
            grading,
            alphas: a.alpha.iter().map(|&x| C::new(x, 0.0)).collect(),
            seed: a.seed,
            tol: a.tol,
            samples: a.samples,
            norms,
            format: a.format,
            out: a.out.clone(),
            threads: a.threads,
            timings: a.timings,
            zeta1: a.zeta1.0,
            zeta2: a.zeta2.0,
            pair: a.pair.kinds(),
            form: a.form,
            z: a.z.0,
        })
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_args(&RunArgs::default()).expect("default configuration is valid")
    }
}
