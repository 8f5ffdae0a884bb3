//! Command-line front end for `pipeline-forge`: single optimization runs,
//! building-block mining, and replicate benchmarks comparing two run
//! configurations.

pub mod args;
pub mod artifacts;
pub mod benchmark;
pub mod commands;
pub mod config;
pub mod error;

pub use args::Cli;
pub use error::CliError;

use args::Command;

/// Runs a parsed command line, returning what should go to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let go = || match &cli.command {
        Command::Optimize(a) => commands::optimize(a),
        Command::Mine(a) => commands::mine(a),
        Command::Benchmark(a) => commands::benchmark(a),
    };
    match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Data(e.to_string()))?
            .install(go),
        None => go(),
    }
}
