//! Command-line front end: argument and config-file resolution, dispatch and
//! exit codes (0 pass, 1 verification failure or numerical error, 2 usage).

mod commands;
pub mod output;
mod sweep;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer};

use crate::integral::{OperatorPower, SParameters};
use crate::lame::{EvaluationPoint, IndicialExponent, LameParams};
use crate::LameError;

pub use output::{Field, Format, Output, Record, Report};
pub use sweep::{parse_grid, Axis};

#[derive(Debug, Parser)]
#[command(
    name = "lame3trf",
    version,
    about = "Lamé functions: series, integral forms and generating functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CommandArgs {
    /// Frobenius series value and ξ-derivatives
    EvalSeries,
    /// Jacobi elliptic functions at z
    EvalSn,
    /// Heun parameters of the algebraic form
    HeunMap,
    /// Numerical identity checks
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Cartesian-product sweep of one command
    Sweep {
        #[arg(long, value_enum)]
        target: SweepTarget,
        /// Axes as `name=v1,v2,...` or `name=start:stop:count`, separated by `;`
        #[arg(long)]
        grid: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Lemma1,
    Ode,
    Residue,
    #[value(name = "gf-order0")]
    GfOrder0,
    #[value(name = "gf-order1")]
    GfOrder1,
    #[value(name = "gf-order2")]
    GfOrder2,
    Kernels,
}

impl VerifyTarget {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lemma1 => "lemma1",
            Self::Ode => "ode",
            Self::Residue => "residue",
            Self::GfOrder0 => "gf-order0",
            Self::GfOrder1 => "gf-order1",
            Self::GfOrder2 => "gf-order2",
            Self::Kernels => "kernels",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    EvalSeries,
    EvalSn,
    HeunMap,
    Ode,
    #[value(name = "gf-order0")]
    GfOrder0,
    #[value(name = "gf-order1")]
    GfOrder1,
    #[value(name = "gf-order2")]
    GfOrder2,
}

/// Options shared by every command. The same keys are accepted in the JSON
/// config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, conflicts_with = "z")]
    pub xi: Option<f64>,
    #[arg(long, global = true)]
    pub z: Option<f64>,
    /// Number of Frobenius or Lemma 1 terms
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub n_terms: Option<usize>,
    /// Chain weights `s0,s1,...,sK`
    #[arg(long, global = true)]
    #[serde(default, deserialize_with = "list_or_string")]
    pub s: Option<String>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Chain length; `s` is cut to `K+1` entries
    #[arg(long = "K", global = true)]
    #[serde(rename = "K")]
    pub k: Option<usize>,
    /// Highest level of the closed kernels checked by `verify kernels`
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub amax: Option<usize>,
    /// Overrides every threshold of the selected check
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    /// Gauss–Jacobi nodes per axis
    #[arg(long, global = true)]
    pub nq: Option<usize>,
    #[arg(long = "contour-m", global = true)]
    #[serde(rename = "contour-m")]
    pub contour_m: Option<usize>,
    /// Power of w∂_w in the level operator (1 or 2)
    #[arg(long = "op-power", global = true)]
    #[serde(rename = "op-power")]
    pub op_power: Option<i64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat JSON object with the same keys as the flags
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn list_or_string<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        List(Vec<f64>),
    }
    Ok(Option::<Raw>::deserialize(d)?.map(|r| match r {
        Raw::Text(s) => s,
        Raw::List(v) => v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","),
    }))
}

impl Options {
    /// Fill every unset field from `other`.
    fn or(self, other: Options) -> Options {
        Options {
            rho: self.rho.or(other.rho),
            h: self.h.or(other.h),
            alpha: self.alpha.or(other.alpha),
            lambda: self.lambda.or(other.lambda),
            // a point given on the command line wins as a whole
            xi: if self.z.is_some() {
                self.xi
            } else {
                self.xi.or(other.xi)
            },
            z: if self.xi.is_some() { self.z } else { self.z.or(other.z) },
            n_terms: self.n_terms.or(other.n_terms),
            s: self.s.or(other.s),
            gamma: self.gamma.or(other.gamma),
            k: self.k.or(other.k),
            nmax: self.nmax.or(other.nmax),
            amax: self.amax.or(other.amax),
            tol: self.tol.or(other.tol),
            c0: self.c0.or(other.c0),
            nq: self.nq.or(other.nq),
            contour_m: self.contour_m.or(other.contour_m),
            op_power: self.op_power.or(other.op_power),
            samples: self.samples.or(other.samples),
            seed: self.seed.or(other.seed),
            format: self.format.or(other.format),
            out: self.out.or(other.out),
            config: self.config,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(LameError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(e) => write!(f, "numerical error: {e}"),
        }
    }
}

impl From<LameError> for CliError {
    fn from(e: LameError) -> Self {
        CliError::Numeric(e)
    }
}

pub(crate) fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointSpec {
    Xi(f64),
    Z(f64),
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandArgs,
    pub rho: f64,
    pub h: f64,
    pub alpha: f64,
    pub lambda: IndicialExponent,
    pub point: PointSpec,
    pub n_terms: Option<usize>,
    pub s: SParameters,
    pub gamma: f64,
    pub n_max: usize,
    pub a_max: Option<usize>,
    pub tol: Option<f64>,
    pub c0: f64,
    pub nq: usize,
    pub contour_m: usize,
    pub op_power: OperatorPower,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20_231_115;

impl RunConfig {
    pub fn from_options(command: CommandArgs, opts: Options) -> Result<Self, CliError> {
        let file = match &opts.config {
            Some(path) => {
                let text =
                    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<Options>(&text)
                    .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
            }
            None => Options::default(),
        };
        let o = opts.or(file);
        let point = match (o.xi, o.z) {
            (Some(_), Some(_)) => return Err(usage("give either xi or z, not both")),
            (_, Some(z)) => PointSpec::Z(z),
            (xi, None) => PointSpec::Xi(xi.unwrap_or(0.1)),
        };
        let mut s = SParameters::parse(o.s.as_deref().unwrap_or("0.3,0.2,0.1")).map_err(usage)?;
        if let Some(k) = o.k {
            if k > s.k() {
                return Err(usage(format!("K = {k} needs {} s values, got {}", k + 1, s.k() + 1)));
            }
            s = SParameters::new(s.values()[..=k].to_vec()).map_err(usage)?;
        }
        let cfg = RunConfig {
            command,
            rho: o.rho.unwrap_or(0.5),
            h: o.h.unwrap_or(1.0),
            alpha: o.alpha.unwrap_or(3.0),
            lambda: IndicialExponent::from_value(o.lambda.unwrap_or(0.0)).map_err(usage)?,
            point,
            n_terms: o.n_terms,
            s,
            gamma: o.gamma.unwrap_or(0.75),
            n_max: o.nmax.unwrap_or(2),
            a_max: o.amax,
            tol: o.tol,
            c0: o.c0.unwrap_or(1.0),
            nq: o.nq.unwrap_or(64),
            contour_m: o.contour_m.unwrap_or(512),
            op_power: OperatorPower::from_exponent(o.op_power.unwrap_or(2)).map_err(usage)?,
            samples: o.samples.unwrap_or(100),
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            format: o.format.unwrap_or(Format::Csv),
            out: o.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every precondition that can be tested before computing.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.point()?;
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(usage(format!("tol must be positive, got {t}")));
            }
        }
        if !(self.gamma > 0.0) {
            return Err(usage(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.c0 == 0.0 || !self.c0.is_finite() {
            return Err(usage("c0 must be finite and non-zero"));
        }
        if self.a_max == Some(0) {
            return Err(usage("amax must be at least 1"));
        }
        if self.nq < 16 || self.contour_m < 128 {
            return Err(usage("nq must be at least 16 and contour-m at least 128"));
        }
        if self.samples == 0 {
            return Err(usage("samples must be at least 1"));
        }
        let needs_k = match &self.command {
            CommandArgs::Verify {
                target: VerifyTarget::GfOrder1,
            }
            | CommandArgs::Sweep {
                target: SweepTarget::GfOrder1,
                ..
            } => 1,
            CommandArgs::Verify {
                target: VerifyTarget::GfOrder2,
            }
            | CommandArgs::Sweep {
                target: SweepTarget::GfOrder2,
                ..
            } => 2,
            _ => 0,
        };
        if self.s.k() < needs_k {
            return Err(usage(format!(
                "order {needs_k} needs K >= {needs_k}, got K = {}",
                self.s.k()
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<LameParams, CliError> {
        LameParams::new(self.rho, self.alpha, self.h).map_err(usage)
    }

    pub fn point(&self) -> Result<EvaluationPoint, CliError> {
        match self.point {
            PointSpec::Xi(xi) => EvaluationPoint::from_xi(xi, self.rho).map_err(usage),
            PointSpec::Z(z) => {
                if !z.is_finite() {
                    return Err(usage("z must be finite"));
                }
                EvaluationPoint::from_z(z, self.rho).map_err(usage)
            }
        }
    }
}

/// Runs a resolved configuration and returns its output.
pub fn execute(cfg: &RunConfig) -> Result<Output, CliError> {
    match &cfg.command {
        CommandArgs::EvalSeries => Ok(Output::Table(vec![commands::eval_series(cfg)?])),
        CommandArgs::EvalSn => Ok(Output::Table(vec![commands::eval_sn(cfg)?])),
        CommandArgs::HeunMap => Ok(Output::Table(vec![commands::heun_map(cfg)?])),
        CommandArgs::Verify { target } => Ok(Output::Reports(commands::verify(cfg, *target)?)),
        CommandArgs::Sweep { target, grid } => sweep::run(cfg, *target, grid),
    }
}

fn label(cmd: &CommandArgs) -> String {
    match cmd {
        CommandArgs::EvalSeries => "eval-series".into(),
        CommandArgs::EvalSn => "eval-sn".into(),
        CommandArgs::HeunMap => "heun-map".into(),
        CommandArgs::Verify { target } => format!("verify {}", target.name()),
        CommandArgs::Sweep { target, .. } => format!(
            "sweep {}",
            target
                .to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default()
        ),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::from_options(cli.command, cli.opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let out = match execute(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let text = out.render(cfg.format);
    let summary = out.summary(&label(&cfg.command));
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("usage error: cannot write {}: {e}", path.display());
                return 2;
            }
            if let Some(s) = summary {
                println!("{s}");
            }
        }
        None => {
            print!("{text}");
            if let Some(s) = summary {
                eprintln!("{s}");
            }
        }
    }
    if out.passed() {
        0
    } else {
        1
    }
}
