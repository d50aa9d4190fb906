//! CLI surface: argument structs and the command dispatcher.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod ensemble;
mod evaluate;
mod forecast;
mod generate;
mod localize;
mod train_global;

pub use ensemble::cmd_ensemble;
pub use evaluate::cmd_evaluate;
pub use forecast::cmd_forecast;
pub use generate::cmd_generate;
pub use localize::cmd_localize;
pub use train_global::cmd_train_global;

/// Global load forecasting with cluster-based localization and per-series
/// forecast ensembles.
#[derive(Debug, Parser)]
#[command(name = "gridcast", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic dataset CSV plus its manifest.
    Generate(GenerateArgs),
    /// Train the pool-wide model and persist it with its training report.
    TrainGlobal(TrainGlobalArgs),
    /// Build the cluster hierarchy and fine-tune one model per cluster.
    Localize(LocalizeArgs),
    /// Build per-series greedy forecast ensembles on validation data.
    Ensemble(EnsembleArgs),
    /// Evaluate all strategies on the test windows and write report CSVs.
    Evaluate(EvaluateArgs),
    /// Write forecasts of one strategy for the validation or test windows.
    Forecast(ForecastArgs),
}

impl Command {
    pub fn run(&self) -> Result<()> {
        match self {
            Command::Generate(args) => cmd_generate(args),
            Command::TrainGlobal(args) => cmd_train_global(args),
            Command::Localize(args) => cmd_localize(args),
            Command::Ensemble(args) => cmd_ensemble(args),
            Command::Evaluate(args) => cmd_evaluate(args),
            Command::Forecast(args) => cmd_forecast(args),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// RNG seed; fixed seeds reproduce the dataset byte for byte.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Series per aggregate type (single, sTS, mTS, lTS).
    #[arg(long = "per-type", value_parser = clap::value_parser!(u32).range(1..))]
    pub per_type: u32,
    /// Weeks of half-hourly data to generate.
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    pub weeks: u32,
    /// Workdir; the dataset lands in `<workdir>/data/synthetic.csv`.
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,
    /// Explicit output CSV path (overrides the workdir layout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainGlobalArgs {
    /// Dataset CSV (defaults to `<workdir>/data/synthetic.csv`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,
    /// Optional TOML configuration file (flags still win).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Units per FC layer.
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Lag-window length K.
    #[arg(long)]
    pub lags: Option<usize>,
    /// Forecast horizon H.
    #[arg(long)]
    pub horizon: Option<usize>,

    #[arg(long = "train-weeks")]
    pub train_weeks: Option<usize>,
    #[arg(long = "val-weeks")]
    pub val_weeks: Option<usize>,
    #[arg(long = "test-weeks")]
    pub test_weeks: Option<usize>,

    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "batch-size")]
    pub batch_size: Option<usize>,
    #[arg(long = "epochs")]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long = "min-delta")]
    pub min_delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interleaved training-row subsampling factor (1 = keep everything).
    #[arg(long)]
    pub subsample: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,

    /// Cluster count C; the hierarchy holds levels 1..C-1.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Centroid split perturbation, in standardized feature units.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "cluster-seed")]
    pub cluster_seed: Option<u64>,

    #[arg(long = "ft-lr")]
    pub ft_lr: Option<f64>,
    #[arg(long = "ft-epochs")]
    pub ft_epochs: Option<usize>,
    #[arg(long = "ft-patience")]
    pub ft_patience: Option<usize>,
    #[arg(long = "ft-min-delta")]
    pub ft_min_delta: Option<f64>,

    /// Parallel fine-tune jobs; results are identical for any job count.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    /// Skip (level, cluster) jobs whose model file already exists.
    #[arg(long)]
    pub resume: bool,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Pool-wide model without localization.
    Global,
    /// One shared hierarchy level for every series.
    All,
    /// Per-series validation-optimal level.
    Best,
    /// Per-series greedy forecast ensemble.
    Ens,
    /// Seasonal naive baseline.
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitPart {
    Validation,
    Test,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "work")]
    pub workdir: PathBuf,
    #[arg(long, value_enum, default_value_t = Strategy::Ens)]
    pub strategy: Strategy,
    #[arg(long, value_enum, default_value_t = SplitPart::Test)]
    pub split: SplitPart,
    /// Output CSV (defaults to `<workdir>/reports/forecast_<strategy>_<split>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub(crate) fn data_path(data: &Option<PathBuf>, workdir: &std::path::Path) -> PathBuf {
    data.clone().unwrap_or_else(|| crate::layout::data_csv(workdir))
}
