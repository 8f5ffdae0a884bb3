//! Files written by `optimize`: the best pipeline in both forms, the Pareto
//! archive and the per-generation history, the latter two as JSON lines.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use pipeline_forge::evolution::{EvolutionResult, GenerationStats};
use pipeline_forge::pipeline::{deserialize, export_readable, serialize};
use pipeline_forge::{Fitness, Individual, ParetoArchive, PipelineTree};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const BEST_PIPELINE: &str = "best_pipeline.txt";
pub const BEST_READABLE: &str = "best_pipeline_readable.txt";
pub const ARCHIVE: &str = "archive.jsonl";
pub const HISTORY: &str = "history.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveRecord {
    pub discovery: usize,
    pub accuracy: f64,
    pub operators: usize,
    pub pipeline: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub generation: usize,
    pub best_accuracy: f64,
    pub median_accuracy: f64,
    pub archive_size: usize,
    pub archive_best_accuracy: f64,
}

impl From<&GenerationStats> for HistoryRecord {
    fn from(s: &GenerationStats) -> Self {
        Self {
            generation: s.generation,
            best_accuracy: s.best_accuracy,
            median_accuracy: s.median_accuracy,
            archive_size: s.archive_size,
            archive_best_accuracy: s.archive_best_accuracy,
        }
    }
}

pub fn archive_records(archive: &ParetoArchive) -> Vec<ArchiveRecord> {
    archive
        .members()
        .iter()
        .map(|m| ArchiveRecord {
            discovery: m.discovery,
            accuracy: m.fitness().accuracy,
            operators: m.fitness().operators,
            pipeline: serialize(m.individual.tree()),
        })
        .collect()
}

/// Rebuilds an archive from its dump.
pub fn archive_from_records(records: &[ArchiveRecord]) -> Result<ParetoArchive, CliError> {
    let mut archive = ParetoArchive::new();
    for r in records {
        let tree = deserialize(&r.pipeline).map_err(|e| CliError::data(&r.pipeline, e))?;
        let fitness = Fitness { accuracy: r.accuracy, operators: r.operators };
        archive.update(&Individual::evaluated(tree, fitness), r.discovery);
    }
    Ok(archive)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::data(path.display(), e))?;
    let mut out = BufWriter::new(file);
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| CliError::data(path.display(), e))?;
        writeln!(out, "{line}").map_err(|e| CliError::data(path.display(), e))?;
    }
    out.flush().map_err(|e| CliError::data(path.display(), e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|e| CliError::data(path.display(), e))?;
    let mut items = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::data(path.display(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        items.push(item);
    }
    Ok(items)
}

/// Reads serialized pipelines, one per line; blank and `#` lines are skipped.
pub fn read_pipelines(path: &Path) -> Result<Vec<PipelineTree>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| deserialize(l).map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1))))
        .collect()
}

pub fn write_run(dir: &Path, result: &EvolutionResult) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::data(dir.display(), e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::data(path.display(), e))
    };
    write(BEST_PIPELINE, format!("{}\n", serialize(result.best.tree())))?;
    write(BEST_READABLE, export_readable(result.best.tree()))?;
    write_jsonl(&dir.join(ARCHIVE), &archive_records(&result.archive))?;
    let history: Vec<HistoryRecord> = result.history.iter().map(HistoryRecord::from).collect();
    write_jsonl(&dir.join(HISTORY), &history)
}
