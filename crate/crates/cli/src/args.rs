use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pamflow_core::{Pam, Params, RhoSpec};

use crate::config::Config;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "pamflow", version, about = "Piecewise affine maps and the slow-fast vector fields that realise them")]
pub struct Cli {
    /// JSON experiment document with optional `pam`, `canonical` and `sim` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate and analyse a piecewise affine map.
    #[command(subcommand)]
    Pam(PamCommand),
    /// Find (α, β, κ, λ) whose associated map is the given one.
    Synth(SynthArgs),
    /// Simulate the full system or the finite-δ hybrid.
    Simulate(SimulateArgs),
    /// Reproduce the reference tables.
    VerifyTables(VerifyArgs),
    /// Sweep (κ, λ) between two synthesized fields and report signature windows.
    Crossover(CrossoverArgs),
}

#[derive(Debug, Subcommand)]
pub enum PamCommand {
    /// Orbit of the map (CSV and cobweb SVG with --out-dir).
    Iterate(IterateArgs),
    /// Signature of the settled orbit.
    Signature(PamOnly),
    /// μ windows for L^1 and 1^s patterns.
    Bounds(BoundsArgs),
    /// Convert to (a, b, μ, l) form, or back with --inverse.
    Transform(TransformArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PamFlags {
    #[arg(long, allow_hyphen_values = true)]
    pub a11: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a12: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a21: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a22: Option<f64>,
}

impl PamFlags {
    pub fn any(&self) -> bool {
        self.a11.is_some() || self.a12.is_some() || self.a21.is_some() || self.a22.is_some()
    }

    /// Flags over the config's `pam` section.
    pub fn resolve(&self, cfg: &Config) -> CliResult<Pam> {
        let base = cfg.pam;
        let pick = |flag: Option<f64>, name: &str, from: fn(&Pam) -> f64| {
            flag.or(base.as_ref().map(from))
                .ok_or_else(|| CliError::Usage(format!("missing --{name} (no `pam` section in config)")))
        };
        Ok(Pam::new(
            pick(self.a11, "a11", |p| p.a11)?,
            pick(self.a12, "a12", |p| p.a12)?,
            pick(self.a21, "a21", |p| p.a21)?,
            pick(self.a22, "a22", |p| p.a22)?,
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhoKind {
    #[value(alias = "fixed_rational")]
    FixedRational,
    Quadratic,
}

#[derive(Debug, Clone, Args)]
pub struct RhoFlags {
    /// ρ family.
    #[arg(long, value_enum)]
    pub rho: Option<RhoKind>,
    /// Constant term of the quadratic ρ = p + x + q x².
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
}

impl RhoFlags {
    pub fn resolve(&self, fallback: RhoSpec<f64>) -> CliResult<RhoSpec<f64>> {
        match self.rho {
            None if self.p.is_some() || self.q.is_some() => Err(CliError::Usage("--p/--q need --rho quadratic".into())),
            None => Ok(fallback),
            Some(RhoKind::FixedRational) => {
                if self.p.is_some() || self.q.is_some() {
                    return Err(CliError::Usage("--p/--q only apply to --rho quadratic".into()));
                }
                Ok(RhoSpec::FixedRational)
            }
            Some(RhoKind::Quadratic) => Ok(RhoSpec::Quadratic { p: self.p.unwrap_or(1.0), q: self.q.unwrap_or(1.0) }),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParamFlags {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub rho: RhoFlags,
}

impl ParamFlags {
    pub fn any(&self) -> bool {
        self.alpha.is_some() || self.beta.is_some() || self.kappa.is_some() || self.lambda.is_some()
    }

    pub fn resolve(&self, cfg: &Config) -> CliResult<Params> {
        let base = cfg.canonical;
        let pick = |flag: Option<f64>, name: &str, from: fn(&Params) -> f64| {
            flag.or(base.as_ref().map(from))
                .ok_or_else(|| CliError::Usage(format!("missing --{name} (no `canonical` section in config)")))
        };
        let mut p = Params::new(
            pick(self.alpha, "alpha", |p| p.alpha)?,
            pick(self.beta, "beta", |p| p.beta)?,
            pick(self.kappa, "kappa", |p| p.kappa)?,
            pick(self.lambda, "lambda", |p| p.lambda)?,
            self.rho.resolve(base.map(|b| b.rho).unwrap_or_default())?,
        );
        p.z0 = base.map_or(0.0, |b| b.z0);
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PamOnly {
    #[command(flatten)]
    pub pam: PamFlags,
}

#[derive(Debug, Clone, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub pam: PamFlags,
    /// Initial value of Z.
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub z0: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Recurrence tolerance for period detection.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Directory for orbit.csv and cobweb.svg.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub l: f64,
    /// Length of the LAO run (pattern L^1).
    #[arg(long = "L")]
    pub lao: Option<u32>,
    /// Length of the SAO run (pattern 1^s).
    #[arg(long = "s")]
    pub sao: Option<u32>,
    /// Report whether this μ lies in the windows.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub pam: PamFlags,
    /// Map (a, b, μ, l) back to (a11, a12, a21, a22).
    #[arg(long)]
    pub inverse: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub pam: PamFlags,
    #[command(flatten)]
    pub rho: RhoFlags,
    /// Print the round-trip residual and the determinants of both solves.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Full,
    Hybrid,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SimMode::Full)]
    pub mode: SimMode,
    /// Vector-field parameters; alternatively give a map with --a11.. to synthesize them.
    #[command(flatten)]
    pub params: ParamFlags,
    #[command(flatten)]
    pub pam: PamFlags,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub max_crossings: Option<usize>,
    #[arg(long)]
    pub max_slow_time: Option<f64>,
    /// Hybrid mode: initial Z at the first jump.
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub z_start: f64,
    /// Hybrid mode: number of returns.
    #[arg(long, default_value_t = 60)]
    pub n_returns: usize,
    /// Also report the signature of the associated map and whether it matches.
    #[arg(long)]
    pub compare_pam: bool,
    /// Directory for series.csv, crossings.csv, returns.csv and SVG plots.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub param_tol: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub bounds_tol: f64,
    /// Write the full report as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CrossoverArgs {
    /// One of the built-in cases, "1^4 1^5" or "2^1 3^1".
    #[arg(long = "case")]
    pub case: Option<String>,
    /// Start map as a11,a12,a21,a22.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub end: Option<Vec<f64>>,
    /// Number of grid points including both ends.
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    #[command(flatten)]
    pub rho: RhoFlags,
    /// Directory for crossover.json and crossover.svg.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
