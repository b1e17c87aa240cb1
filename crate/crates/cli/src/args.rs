use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "crowdrate",
    version,
    about = "Rate bounds and Monte Carlo checks for crowdsourced labeling"
)]
pub struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the output here instead of stdout. A manifest is written next
    /// to it as `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Significant digits for numbers in CSV and single-value output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// Flat `key = value` file of flag defaults; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Minimum rate (queries per item) needed for a target error.
    Bounds(BoundsArgs),
    /// kIC rate thresholds next to the information-theoretic limit.
    Figure2(Figure2Args),
    /// Monte Carlo simulation, optionally swept over one parameter.
    Simulate(SimulateArgs),
    /// Check a simulation configuration without running it.
    Validate(SimulateArgs),
    /// Break-even price for k2-item queries given the price of k1-item ones.
    Price(PriceArgs),
    /// Re-run the invocation recorded in a manifest and verify its checksum.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Figure2(_) => "figure2",
            Command::Simulate(_) => "simulate",
            Command::Validate(_) => "validate",
            Command::Price(_) => "price",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    /// Skill levels unknown to the crowdsourcer.
    SlUk,
    /// Skill levels known to the crowdsourcer.
    SlCs,
    /// Spammer-hammer workers.
    Shc,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::SlUk => "sl-uk",
            Scenario::SlCs => "sl-cs",
            Scenario::Shc => "shc",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub scenario: Scenario,

    /// Label probabilities, e.g. `0.7,0.3`. Defaults to a uniform binary source.
    #[arg(long)]
    pub source: Option<String>,

    /// Number of answer choices per query.
    #[arg(long = "M", default_value_t = 2)]
    pub alphabet: usize,

    /// Worker skills as `eps:prob,...`, or a single `eps`.
    #[arg(long)]
    pub population: Option<String>,

    /// Hammer probability (shc scenario).
    #[arg(long)]
    pub q: Option<f64>,

    /// Target errors: a list `a,b,c` or a range `start:stop:step`.
    #[arg(long = "eps-grid", default_value = "0.005:0.495:0.005")]
    pub eps_grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct Figure2Args {
    #[arg(long, default_value_t = 0.3)]
    pub q: f64,

    /// Query arities, e.g. `2,3,4`.
    #[arg(long, default_value = "2,3,4")]
    pub k: String,

    #[arg(long, default_value = "0.005:0.495:0.005")]
    pub grid: String,

    /// Alphabet of the information-theoretic curve (default `2^(k_max-1)`).
    #[arg(long = "M")]
    pub alphabet: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Shc,
    Msc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    Oracle,
    Majority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepAxisArg {
    /// Queries per item.
    RPrime,
    /// Hammer probability.
    Q,
    /// Target error; each point uses the smallest sufficient `R′`.
    EpsHat,
}

impl SweepAxisArg {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxisArg::RPrime => "r-prime",
            SweepAxisArg::Q => "q",
            SweepAxisArg::EpsHat => "eps-hat",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "shc")]
    pub model: Model,

    /// Hammer probability (shc model).
    #[arg(long)]
    pub q: Option<f64>,

    /// Worker skills as `eps:prob,...`, or a single `eps` (msc model).
    #[arg(long)]
    pub population: Option<String>,

    /// Defaults to `oracle` for shc and `majority` for msc.
    #[arg(long, value_enum)]
    pub decoder: Option<DecoderArg>,

    /// Items per query. Defaults to 3 for the oracle decoder, 1 for majority.
    #[arg(long)]
    pub k: Option<usize>,

    /// Queries each item appears in (`R′`).
    #[arg(long = "queries-per-item", alias = "r-prime", default_value_t = 3)]
    pub queries_per_item: u32,

    #[arg(long = "n-items", default_value_t = 10_000)]
    pub n_items: usize,

    #[arg(long, default_value_t = 20)]
    pub trials: u32,

    /// Label probabilities, e.g. `0.5,0.5`.
    #[arg(long)]
    pub source: Option<String>,

    #[arg(long = "sweep-axis", value_enum, requires = "sweep_grid")]
    pub sweep_axis: Option<SweepAxisArg>,

    /// Values for the sweep axis: a list or `start:stop:step`.
    #[arg(long = "sweep-grid", requires = "sweep_axis")]
    pub sweep_grid: Option<String>,

    /// Exit with status 1 if any point misses its prediction by more than 4σ.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PriceArgs {
    #[arg(long)]
    pub k1: usize,

    #[arg(long)]
    pub k2: usize,

    /// Price paid per `k1`-item query.
    #[arg(long)]
    pub pi1: f64,

    /// Use the ratio of exact kIC rate thresholds (needs `--q` and `--eps`).
    #[arg(long)]
    pub exact: bool,

    #[arg(long)]
    pub q: Option<f64>,

    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}
