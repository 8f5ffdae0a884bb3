use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::InitChoice;

#[derive(Debug, Parser)]
#[command(name = "pipeline-forge", version, about = "Evolve machine learning pipelines with genetic programming")]
pub struct Cli {
    /// Worker threads for evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve pipelines on one dataset and write the results.
    Optimize(OptimizeArgs),
    /// Mine a building-block vocabulary from archives and pipeline lists.
    Mine(MineArgs),
    /// Compare two run configurations over replicate runs.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the class column.
    #[arg(long, default_value = "class")]
    pub class: String,
    #[arg(long, default_value_t = 100)]
    pub pop_size: usize,
    #[arg(long, default_value_t = 100)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub crossover_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 0.2)]
    pub select_fraction: f64,
    /// Offspring per selected parent.
    #[arg(long, default_value_t = 5)]
    pub offspring: usize,
    #[arg(long, env = "PIPELINE_FORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitChoice::Random)]
    pub init: InitChoice,
    /// Vocabulary file for sensible initialization.
    #[arg(long)]
    pub blocks: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 50)]
    pub max_operators: usize,
    /// Fraction of each class used for training.
    #[arg(long, default_value_t = 0.75)]
    pub train_fraction: f64,
    /// Output directory.
    #[arg(long, default_value = "pipeline-forge-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Archive dumps (`archive.jsonl`); the best member of each is mined.
    #[arg(long, num_args = 1..)]
    pub archives: Vec<PathBuf>,
    /// Files of serialized pipelines, one per line; every pipeline is mined.
    #[arg(long, num_args = 1..)]
    pub pipelines: Vec<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    #[arg(long, default_value_t = 100)]
    pub top_k: usize,
    /// Vocabulary file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// CSV datasets to compare on.
    #[arg(long, num_args = 1.., required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long, default_value = "class")]
    pub class: String,
    /// TOML run configuration for side A.
    #[arg(long)]
    pub config_a: PathBuf,
    /// TOML run configuration for side B.
    #[arg(long)]
    pub config_b: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub replicates: usize,
    /// First replicate seed.
    #[arg(long, env = "PIPELINE_FORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::benchmark::DEFAULT_RESAMPLES)]
    pub resamples: usize,
    /// Report file (JSON lines).
    #[arg(long, default_value = "benchmark.jsonl")]
    pub out: PathBuf,
}
