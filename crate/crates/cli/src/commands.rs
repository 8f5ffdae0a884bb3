use pipeline_forge::blocks::{count_ngrams, top_k};
use pipeline_forge::dataset::load_csv;
use pipeline_forge::evolve;
use pipeline_forge::pipeline::{serialize, TreeLimits};
use pipeline_forge::{GpConfig, PipelineTree};

use crate::args::{BenchmarkArgs, MineArgs, OptimizeArgs};
use crate::artifacts::{self, archive_from_records, read_jsonl, read_pipelines, ArchiveRecord};
use crate::benchmark::{run_benchmark, summary_table, write_report, BenchmarkSpec};
use crate::config::{read_blocks, InitChoice, RunConfig};
use crate::error::CliError;

pub fn optimize_config(args: &OptimizeArgs) -> Result<GpConfig, CliError> {
    let blocks = match (&args.blocks, args.init) {
        (Some(path), _) => Some(read_blocks(path)?),
        (None, InitChoice::Sensible) => return Err(CliError::Usage("--init sensible requires --blocks".into())),
        (None, InitChoice::Random) => None,
    };
    let cfg = GpConfig {
        population_size: args.pop_size,
        generations: args.generations,
        select_fraction: args.select_fraction,
        offspring_per_parent: args.offspring,
        crossover_rate: args.crossover_rate,
        mutation_rate: args.mutation_rate,
        seed: args.seed,
        init_mode: args.init.into(),
        blocks,
        limits: TreeLimits { max_depth: args.max_depth, max_operators: args.max_operators },
        train_fraction: args.train_fraction,
        weighted_blocks: false,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Returns the text printed on success.
pub fn optimize(args: &OptimizeArgs) -> Result<String, CliError> {
    let cfg = optimize_config(args)?;
    let data = load_csv(&args.data, &args.class).map_err(|e| CliError::data(args.data.display(), e))?;
    let result = evolve(&cfg, &data).map_err(|e| CliError::Data(e.to_string()))?;
    artifacts::write_run(&args.out, &result)?;
    let fitness = result.best.fitness().expect("archive members are evaluated");
    Ok(format!(
        "best test balanced accuracy: {}\noperators: {}\npipeline: {}\n",
        fitness.accuracy,
        fitness.operators,
        serialize(result.best.tree())
    ))
}

pub fn mine(args: &MineArgs) -> Result<String, CliError> {
    if args.archives.is_empty() && args.pipelines.is_empty() {
        return Err(CliError::Usage("give at least one --archives or --pipelines file".into()));
    }
    let mut corpus: Vec<PipelineTree> = Vec::new();
    for path in &args.archives {
        let records: Vec<ArchiveRecord> = read_jsonl(path)?;
        let archive = archive_from_records(&records)?;
        let best = archive
            .best()
            .ok_or_else(|| CliError::Data(format!("{}: archive is empty", path.display())))?;
        corpus.push(best.individual.tree().clone());
    }
    for path in &args.pipelines {
        corpus.extend(read_pipelines(path)?);
    }
    if corpus.is_empty() {
        return Err(CliError::Data("corpus holds no pipelines".into()));
    }
    let counts = count_ngrams(&corpus, args.max_n).map_err(|e| CliError::Usage(e.to_string()))?;
    let vocabulary = top_k(&counts, args.top_k).map_err(|e| CliError::Data(e.to_string()))?;
    vocabulary.save(&args.out).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(format!(
        "{} pipelines, {} distinct n-grams, wrote {} blocks to {}\n",
        corpus.len(),
        counts.len(),
        vocabulary.len(),
        args.out.display()
    ))
}

pub fn benchmark(args: &BenchmarkArgs) -> Result<String, CliError> {
    let spec = BenchmarkSpec {
        datasets: args.data.clone(),
        class_column: args.class.clone(),
        config_a: RunConfig::load(&args.config_a)?,
        config_b: RunConfig::load(&args.config_b)?,
        replicates: args.replicates,
        seed: args.seed,
        resamples: args.resamples,
    };
    let records = run_benchmark(&spec)?;
    write_report(&args.out, &records)?;
    Ok(summary_table(&records))
}
