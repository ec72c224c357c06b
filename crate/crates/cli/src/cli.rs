use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gkp_qpc::QpcShape;

use crate::args::{parse_grid, parse_interval, parse_probs, parse_shape, parse_shapes, parse_usize_list};

#[derive(Debug, Parser)]
#[command(name = "gkp-qpc", version, about = "GKP + HRM + quantum parity code simulator")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact HRM outcome probabilities over a noise grid and danger zones.
    HrmCurves(HrmCurvesArgs),
    /// Monte Carlo logical failure rates over shapes and noise values.
    Sweep(SweepArgs),
    /// Crossover threshold of a code ladder.
    Threshold(ThresholdArgs),
    /// Threshold as a function of the danger zone, and its optimum.
    OptimizeDelta(OptimizeDeltaArgs),
    /// Exact failure rates of a small code by enumeration.
    Oracle(OracleArgs),
    /// Replays the command recorded in a manifest.
    Rerun(RerunArgs),
    /// Prints the hashing bound 1/sqrt(e).
    HashingBound,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DeltaArg {
    /// Danger zone half-width in absolute units.
    #[arg(long, conflicts_with = "delta_sqrtpi", allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Danger zone half-width as a multiple of sqrt(pi).
    #[arg(long, allow_negative_numbers = true)]
    pub delta_sqrtpi: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DeltaGridArg {
    /// Danger zones in absolute units (list, a:b:step or a:b#count).
    #[arg(long, value_parser = parse_grid, conflicts_with = "deltas_sqrtpi")]
    pub deltas: Option<::std::vec::Vec<f64>>,
    /// Danger zones as multiples of sqrt(pi).
    #[arg(long, value_parser = parse_grid)]
    pub deltas_sqrtpi: Option<::std::vec::Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Trials per (shape, xi) point.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct LadderArgs {
    /// Explicit ladder, smallest code first, e.g. "3x2,5x3,7x4".
    #[arg(long, value_parser = parse_shapes, conflicts_with = "ladder")]
    pub shapes: Option<::std::vec::Vec<QpcShape>>,
    /// `auto` balances m for each n of --n-list (the default when --shapes is absent).
    #[arg(long, value_parser = ["auto"])]
    pub ladder: Option<String>,
    #[arg(long, value_parser = parse_usize_list, default_value = "3,5,7,9")]
    pub n_list: ::std::vec::Vec<usize>,
    /// Noise at which X and Z errors are balanced (default: interval midpoint).
    #[arg(long)]
    pub probe: Option<f64>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub m_max: u64,
    /// Trials per candidate shape while balancing (default: --trials).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub balance_trials: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct HrmCurvesArgs {
    /// Noise standard deviations (conflicts with --db).
    #[arg(long = "std", value_parser = parse_grid, conflicts_with = "db")]
    pub std_devs: Option<::std::vec::Vec<f64>>,
    /// Squeezing values in dB (default 0:16#33).
    #[arg(long, value_parser = parse_grid)]
    pub db: Option<::std::vec::Vec<f64>>,
    #[command(flatten)]
    pub deltas: DeltaGridArg,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_shapes, default_value = "3x2,5x3,7x4")]
    pub shapes: ::std::vec::Vec<QpcShape>,
    #[arg(long, value_parser = parse_grid, default_value = "0.40:0.70:0.01")]
    pub xi: ::std::vec::Vec<f64>,
    #[command(flatten)]
    pub delta: DeltaArg,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub delta: DeltaArg,
    /// Search interval for the noise, lo:hi.
    #[arg(long, value_parser = parse_interval, default_value = "0.45:0.70")]
    pub interval: (f64, f64),
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeDeltaArgs {
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub deltas: DeltaGridArg,
    #[arg(long, value_parser = parse_interval, default_value = "0.45:0.70")]
    pub interval: (f64, f64),
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, value_parser = parse_shape)]
    pub shape: QpcShape,
    /// Noise standard deviation; required unless --probs is given.
    #[arg(long, required_unless_present = "probs")]
    pub xi: Option<f64>,
    #[command(flatten)]
    pub delta: DeltaArg,
    /// Explicit outcome probabilities p_correct,p_incorrect,p_discard.
    #[arg(long, value_parser = parse_probs, conflicts_with_all = ["xi", "delta", "delta_sqrtpi"])]
    pub probs: Option<(f64, f64, f64)>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fail unless every output digest matches the manifest.
    #[arg(long)]
    pub check: bool,
}
