mod commands;
mod config;
mod error;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Entity embeddings for languages and yearly task categories.
#[derive(Debug, Parser)]
#[command(name = "ent2vec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a JSONL corpus and write an ingest report.
    Ingest(IngestArgs),
    /// Train entity embeddings and write a model file.
    Train(TrainArgs),
    /// Compute an analysis table from a model or corpus.
    Analyze(AnalyzeArgs),
    /// Project entity embeddings to 2-D with t-SNE.
    Project(ProjectArgs),
    /// Generate a synthetic corpus with planted affinities.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Ns,
    Softmax,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Embedding dimension [default: 100]
    #[arg(long)]
    pub dim: Option<usize>,
    /// [default: 5]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Negative samples per pair [default: 5]
    #[arg(long)]
    pub negatives: Option<usize>,
    /// [default: 5]
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Subsampling threshold, 0 disables [default: 1e-3]
    #[arg(long)]
    pub subsample: Option<f64>,
    /// Initial learning rate [default: 0.025]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Learning-rate floor [default: 1e-4]
    #[arg(long)]
    pub lr_min: Option<f64>,
    /// [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: 1]
    #[arg(long)]
    pub threads: Option<usize>,
    /// [default: ns]
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Inclusivity,
    Preference,
    Distribution,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Required for the distribution metric.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub metric: Metric,
    /// Unit-normalize rows before averaging.
    #[arg(long)]
    pub normalize: bool,
    /// CSV output. Preference ranks go here and distances to
    /// `<stem>.distance.csv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Capped at (n - 1) / 3 [default: 30]
    #[arg(long)]
    pub perplexity: Option<f64>,
    /// [default: 1000]
    #[arg(long)]
    pub iters: Option<usize>,
    /// [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON spec; the built-in canonical spec when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Overrides the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest(args),
        Command::Train(args) => commands::train(args),
        Command::Analyze(args) => commands::analyze(args),
        Command::Project(args) => commands::project(args),
        Command::Synth(args) => commands::synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
