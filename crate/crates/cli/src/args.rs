use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "lops", version, about = "Leray-Ohya symbol analyzer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure, determinant, factorization, hyperbolicity and Gevrey
    /// exponent of a `.lops` system.
    Analyze(AnalyzeArgs),
    /// Checks on the Einstein-Navier-Stokes reference instance.
    Ens {
        #[command(subcommand)]
        command: EnsCommand,
    },
    /// Root sheets of one ENS factor along lines `eta + s tau`.
    Cones(ConesArgs),
    /// Finite-difference tensor identity checks.
    Lab {
        #[command(subcommand)]
        command: LabCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum EnsCommand {
    /// Full verification of the characteristic determinant.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum LabCommand {
    /// Residual tables over a sequence of refined grids.
    Run(LabArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV (cones and lab only).
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Time direction, comma separated rationals.
    #[arg(long, default_value = "1,0,0,0")]
    pub tau: String,
    /// Sampled directions per factor.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random general states for the numeric determinant comparison.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Sampled directions for hyperbolicity.
    #[arg(long, default_value_t = 1000)]
    pub directions: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bulk parameter at the Minkowski rest point.
    #[arg(long, default_value = "1/2")]
    pub q: String,
    /// Rescaling factor at the Minkowski rest point.
    #[arg(long = "F", default_value = "1")]
    pub f: String,
    /// Skip the full symbolic expansion of the determinant.
    #[arg(long)]
    pub skip_symbolic: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConesArgs {
    /// One of light, flow, flow_light, P1, P2.
    #[arg(long, default_value = "light")]
    pub factor: String,
    /// Number of directions.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value = "1,0,0,0")]
    pub tau: String,
    #[arg(long, default_value = "1/2")]
    pub q: String,
    #[arg(long = "F", default_value = "1")]
    pub f: String,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LabArgs {
    /// Coarsest grid spacing.
    #[arg(long, default_value_t = 0.1)]
    pub h: f64,
    /// Number of grids, halving the spacing each time.
    #[arg(long, default_value_t = 2)]
    pub refine: usize,
    /// Nodes per axis on the coarsest grid.
    #[arg(long, default_value_t = 9)]
    pub nodes: usize,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub vartheta: f64,
    /// Seed of the analytic test family.
    #[arg(long, default_value_t = lops_core::lab::STANDARD_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
