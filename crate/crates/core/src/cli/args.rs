use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mrc-outage",
    version,
    about = "Outage of multi-antenna MRC receivers in Poisson networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability versus SIR threshold: analytic mixture and Monte Carlo.
    OutageSweep(SweepArgs),
    /// Outage probability versus antenna count at a fixed threshold.
    AntennaSweep(SweepArgs),
    /// Mixture weight matching the joint SIR CCDF of the Poisson network.
    TuneQ(TuneArgs),
    /// Interference, inverse-interference and SIR correlations between two antennas.
    Correlations(CommonArgs),
    /// Single-point Monte Carlo outage estimate.
    Simulate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Swept values: `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Skip the Monte Carlo columns.
    #[arg(long)]
    pub no_mc: bool,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Variable to sweep; without it a single point is tuned.
    #[arg(long, value_enum)]
    pub sweep: Option<SweepVariable>,
    /// Swept values: `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    #[value(name = "threshold-db")]
    ThresholdDb,
    Antennas,
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QPolicy {
    /// Match the joint SIR CCDF of the Poisson network.
    Tuned,
    /// Match the interference correlation, `q² = 1/2`.
    CorrMatch,
    /// Use the value given by `--q` or `--q-squared`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Ppp,
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Integration {
    Auto,
    Quadrature,
    Sampling,
}

/// Flags shared by all subcommands. Unset flags fall back to the config file,
/// then to built-in defaults.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Path-loss exponent (> 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Active-interferer intensity λp per m² (sets λ with p = 1).
    #[arg(long, conflicts_with_all = ["lambda", "p"])]
    pub intensity: Option<f64>,
    /// Transmitter density λ per m².
    #[arg(long)]
    pub lambda: Option<f64>,
    /// ALOHA transmit probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// Serving-link distance in m.
    #[arg(long)]
    pub d: Option<f64>,
    /// Path-loss regularizer ε in 1/(ε + r^α); simulation only.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// SIR threshold in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold_db: Option<f64>,
    /// Number of receive antennas.
    #[arg(long)]
    pub antennas: Option<usize>,
    /// Mixture weight q (implies the fixed policy).
    #[arg(long, conflicts_with = "q_squared")]
    pub q: Option<f64>,
    /// Mixture weight(s) given as q²; sweeps add one analytic column per value.
    #[arg(long, value_delimiter = ',')]
    pub q_squared: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub q_policy: Option<QPolicy>,
    /// Interference model for Monte Carlo commands.
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed; a random one is drawn and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (1 = sequential).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Simulation window: `auto` or the half-width L in m.
    #[arg(long)]
    pub window: Option<String>,
    /// Simplex integration method for the analytic outage.
    #[arg(long, value_enum)]
    pub integration: Option<Integration>,
    /// Samples per simplex integral when sampling is used.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `key = value` file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}
