//! The `bcs` command line: `verify`, `scan`, `simulate`, `fit` and `predict-rate`.
//!
//! Model configs are JSON files read by [`bcs_models::ModelConfig`]. Every command writes a
//! [`RunManifest`] next to its output (`<out>.manifest.json`), or to stderr when it prints
//! to stdout. Random trials are seeded from the config digest.

pub mod commands;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use manifest::{seed_from_digest, sha256_hex, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "bcs", version, about = "Boundary-coupled systems: checks, resolvent scans and energy decay")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Passivity, node identities, feedback and swap formulas, and the coupled resolvent checks.
    Verify(VerifyArgs),
    /// Resolvent scan along the imaginary axis with the bound certificate.
    Scan(ScanArgs),
    /// Energy curve of a Cayley trajectory.
    Simulate(SimulateArgs),
    /// Power-law fit of one CSV column against the first.
    Fit(FitArgs),
    /// Decay exponent predicted from a resolvent growth rate.
    PredictRate(PredictArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub config: PathBuf,
    /// Random vectors per passivity check.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    Pointwise,
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Simplified,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub smin: f64,
    #[arg(long, default_value_t = 200.0, allow_negative_numbers = true)]
    pub smax: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Geometric spacing.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value_t = SamplingArg::Pointwise)]
    pub sampling: SamplingArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    pub variant: VariantArg,
    /// Scan CSV; the certificate goes to the same stem with `.certificate.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataArg {
    /// Seeded smooth fields.
    Smooth,
    /// Seeded independent normals.
    Random,
    Zero,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Overrides `simulate.dt`.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Overrides `simulate.t_max`.
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    /// Smoothing order `k`; overrides `simulate.smoothing_order`.
    #[arg(long)]
    pub smooth: Option<usize>,
    /// Overrides `simulate.record_stride`.
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, value_enum, default_value_t = DataArg::Smooth)]
    pub data: DataArg,
    /// Defaults to the config digest.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub csv: PathBuf,
    /// Column fitted against the first column.
    #[arg(long)]
    pub column: String,
    /// `min,max` of the first column.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Direct,
    Network,
    Acoustic,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Power-law exponent of the input rate.
    #[arg(long, required_unless_present = "table", conflicts_with = "table", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Two-column CSV with a header: `M(s)` (direct), `r₀(t)` (network) or `M₀(s)` (acoustic).
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub map: MapArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `Ok(false)` when a check ran and failed.
pub fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Verify(a) => commands::verify(a),
        Command::Scan(a) => commands::scan(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Fit(a) => commands::fit(a),
        Command::PredictRate(a) => commands::predict_rate(a),
    }
}
