use clap::{Args, Parser, Subcommand, ValueEnum};
use nlchan::channels::LogBase;

/// Reproducible interference-channel experiments with classical, quantum,
/// and super-quantum sender resources.
#[derive(Debug, Parser)]
#[command(name = "nlchan", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo coding run on a channel with a chosen sender resource.
    Simulate(SimulateArgs),
    /// Multi-restart sphere-constrained search for the best classical
    /// product-distribution sum rate.
    Optimize(OptimizeArgs),
    /// Capacity bounds across erasure parameters.
    Bounds(BoundsArgs),
    /// CHSH game values per resource, analytic and sampled.
    Chsh(ChshArgs),
    /// Measurement-probability property suites (runs and reports counts).
    PovmCheck(PovmCheckArgs),
    /// Per-epsilon capacity separation table with certification flags.
    Separations(SeparationsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResourceArg {
    /// Independent senders with a fixed (uniform) input distribution.
    Classical,
    /// Shared entanglement at the optimal CHSH statistics.
    Quantum,
    /// Shared PR-box.
    Pr,
    /// One bit of sender-to-sender communication.
    OneBitComm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    Bits,
    Nats,
}

impl From<LogBaseArg> for LogBase {
    fn from(value: LogBaseArg) -> Self {
        match value {
            LogBaseArg::Bits => LogBase::Bits,
            LogBaseArg::Nats => LogBase::Nats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Human,
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// RNG seed; required for json/csv output so records are reproducible.
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, value_enum, default_value = "bits")]
    pub log_base: LogBaseArg,

    #[arg(long, value_enum, default_value = "human")]
    pub output: OutputArg,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub channel: ChannelArg,

    /// Erasure parameter; required for (and only for) channel two.
    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long, value_enum)]
    pub resource: ResourceArg,

    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,

    /// Also dump a per-trial CSV transcript to this path.
    #[arg(long)]
    pub transcript: Option<std::path::PathBuf>,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub channel: ChannelArg,

    #[arg(long)]
    pub epsilon: Option<f64>,

    #[arg(long, default_value_t = 1000)]
    pub restarts: usize,

    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    #[arg(long, default_value_t = 500)]
    pub maxiter: usize,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Comma-separated erasure parameters.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.5,1.0")]
    pub epsilons: Vec<f64>,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PovmCheckArgs {
    /// Random instances per property suite.
    #[arg(long, default_value_t = 10_000)]
    pub instances: u64,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SeparationsArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    pub epsilons: Vec<f64>,

    /// Optimizer restarts per epsilon for the classical empirical maximum.
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,

    #[command(flatten)]
    pub common: CommonArgs,
}
