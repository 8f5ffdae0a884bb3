//! Paired replicate comparison of two run configurations.
//!
//! Every dataset is run `replicates` times under each configuration with
//! seeds `seed, seed + 1, ...`; replicate `r` of both sides shares its seed
//! and so its train/test split. The report is JSON lines: one `replicate`
//! record per run, a `summary` per dataset and configuration, a
//! `comparison` per dataset, and an `error` for datasets that fail to load.

use std::path::{Path, PathBuf};
use std::time::Instant;

use pipeline_forge::dataset::load_csv;
use pipeline_forge::evolution::{dominates, evolve_with};
use pipeline_forge::seed;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::{read_jsonl, write_jsonl};
use crate::config::RunConfig;
use crate::error::CliError;

pub const DEFAULT_RESAMPLES: usize = 10_000;
/// Two-sided level of the bootstrap interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Record {
    Replicate {
        dataset: String,
        config: Side,
        replicate: usize,
        seed: u64,
        accuracy: f64,
        operators: usize,
        archive_size: usize,
        /// Archive mutually non-dominated and its best accuracy
        /// non-decreasing, checked after every generation.
        archive_ok: bool,
    },
    Summary {
        dataset: String,
        config: Side,
        name: String,
        settings: RunConfig,
        accuracies: Vec<f64>,
        median: f64,
        ci_low: f64,
        ci_high: f64,
        wall_seconds: f64,
    },
    Comparison {
        dataset: String,
        /// Median over replicates of `accuracy(B) - accuracy(A)`.
        median_difference: f64,
        ci_low: f64,
        ci_high: f64,
    },
    Error {
        dataset: String,
        message: String,
    },
}

#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub datasets: Vec<PathBuf>,
    pub class_column: String,
    pub config_a: RunConfig,
    pub config_b: RunConfig,
    pub replicates: usize,
    pub seed: u64,
    pub resamples: usize,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Percentile bootstrap interval of the median. The order statistics used
/// are symmetric, so negating the sample negates and swaps the bounds
/// exactly. The interval is widened if needed to contain the sample median.
pub fn bootstrap_median_ci(values: &[f64], resamples: usize, seed: u64) -> (f64, f64) {
    let m = median(values);
    if values.is_empty() || resamples == 0 {
        return (m, m);
    }
    let mut rng = seed::stream(seed, &[]);
    let mut medians: Vec<f64> = (0..resamples)
        .map(|_| {
            let sample: Vec<f64> = (0..values.len()).map(|_| values[rng.random_range(0..values.len())]).collect();
            median(&sample)
        })
        .collect();
    medians.sort_by(f64::total_cmp);
    let k = ((1.0 - CONFIDENCE) / 2.0 * resamples as f64).floor() as usize;
    let (lo, hi) = (medians[k], medians[resamples - 1 - k]);
    (lo.min(m), hi.max(m))
}

fn dataset_label(path: &Path) -> String {
    path.display().to_string()
}

struct Outcome {
    accuracy: f64,
    operators: usize,
    archive_size: usize,
    archive_ok: bool,
}

fn run_one(cfg: &RunConfig, data: &pipeline_forge::Dataset, seed: u64) -> Result<Outcome, CliError> {
    let gp = cfg.to_gp(seed)?;
    let mut ok = true;
    let mut last_best = f64::NEG_INFINITY;
    let result = evolve_with(&gp, data, |stats, archive| {
        let members = archive.members();
        let non_dominated = members
            .iter()
            .all(|a| members.iter().all(|b| !dominates(&a.fitness(), &b.fitness())));
        ok &= non_dominated && stats.archive_best_accuracy >= last_best;
        last_best = stats.archive_best_accuracy;
    })
    .map_err(|e| CliError::Data(e.to_string()))?;
    let fitness = result.best.fitness().expect("archive members are evaluated");
    Ok(Outcome {
        accuracy: fitness.accuracy,
        operators: fitness.operators,
        archive_size: result.archive.len(),
        archive_ok: ok,
    })
}

/// Runs the full comparison. Configuration errors abort; a dataset that
/// cannot be loaded yields an `error` record and the run moves on.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<Vec<Record>, CliError> {
    if spec.replicates < 2 {
        return Err(CliError::Usage(format!("need at least 2 replicates, got {}", spec.replicates)));
    }
    // surface configuration problems before any work is done
    spec.config_a.to_gp(spec.seed)?;
    spec.config_b.to_gp(spec.seed)?;

    let mut records = Vec::new();
    for (index, path) in spec.datasets.iter().enumerate() {
        let dataset = dataset_label(path);
        let data = match load_csv(path, &spec.class_column) {
            Ok(d) => d,
            Err(e) => {
                records.push(Record::Error { dataset, message: e.to_string() });
                continue;
            }
        };
        let mut accuracies = Vec::new();
        for (side, cfg) in [(Side::A, &spec.config_a), (Side::B, &spec.config_b)] {
            let started = Instant::now();
            let outcomes: Vec<Outcome> = (0..spec.replicates)
                .into_par_iter()
                .map(|r| run_one(cfg, &data, spec.seed + r as u64))
                .collect::<Result<_, _>>()?;
            let wall_seconds = started.elapsed().as_secs_f64();
            let acc: Vec<f64> = outcomes.iter().map(|o| o.accuracy).collect();
            for (r, o) in outcomes.iter().enumerate() {
                records.push(Record::Replicate {
                    dataset: dataset.clone(),
                    config: side,
                    replicate: r,
                    seed: spec.seed + r as u64,
                    accuracy: o.accuracy,
                    operators: o.operators,
                    archive_size: o.archive_size,
                    archive_ok: o.archive_ok,
                });
            }
            let (ci_low, ci_high) = bootstrap_median_ci(&acc, spec.resamples, seed::derive_seed(spec.seed, &[index as u64, side as u64]));
            let name = cfg.name.clone().unwrap_or_else(|| format!("{side:?}"));
            records.push(Record::Summary {
                dataset: dataset.clone(),
                config: side,
                name,
                settings: cfg.clone(),
                median: median(&acc),
                accuracies: acc.clone(),
                ci_low,
                ci_high,
                wall_seconds,
            });
            accuracies.push(acc);
        }
        let differences: Vec<f64> = accuracies[1].iter().zip(&accuracies[0]).map(|(b, a)| b - a).collect();
        let (ci_low, ci_high) = bootstrap_median_ci(&differences, spec.resamples, seed::derive_seed(spec.seed, &[index as u64, 2]));
        records.push(Record::Comparison { dataset, median_difference: median(&differences), ci_low, ci_high });
    }
    Ok(records)
}

pub fn write_report(path: &Path, records: &[Record]) -> Result<(), CliError> {
    write_jsonl(path, records)
}

pub fn read_report(path: &Path) -> Result<Vec<Record>, CliError> {
    read_jsonl(path)
}

/// Medians and paired differences recomputed from the replicate records.
pub fn recompute_comparisons(records: &[Record]) -> Vec<(String, f64, f64, f64)> {
    let mut datasets: Vec<String> = Vec::new();
    for r in records {
        if let Record::Replicate { dataset, .. } = r {
            if !datasets.contains(dataset) {
                datasets.push(dataset.clone());
            }
        }
    }
    datasets
        .into_iter()
        .map(|name| {
            let side = |which: Side| -> Vec<(usize, f64)> {
                let mut v: Vec<(usize, f64)> = records
                    .iter()
                    .filter_map(|r| match r {
                        Record::Replicate { dataset, config, replicate, accuracy, .. }
                            if *dataset == name && *config == which =>
                        {
                            Some((*replicate, *accuracy))
                        }
                        _ => None,
                    })
                    .collect();
                v.sort_by_key(|p| p.0);
                v
            };
            let (a, b) = (side(Side::A), side(Side::B));
            let acc_a: Vec<f64> = a.iter().map(|p| p.1).collect();
            let acc_b: Vec<f64> = b.iter().map(|p| p.1).collect();
            let diff: Vec<f64> = acc_b.iter().zip(&acc_a).map(|(y, x)| y - x).collect();
            (name, median(&acc_a), median(&acc_b), median(&diff))
        })
        .collect()
}

/// Fixed-width text table of the summary and comparison records.
pub fn summary_table(records: &[Record]) -> String {
    let mut out = format!(
        "{:<32} {:>9} {:>9} {:>10} {:>21}\n",
        "dataset", "median A", "median B", "B - A", "95% CI of B - A"
    );
    let summary = |name: &str, which: Side| {
        records.iter().find_map(|r| match r {
            Record::Summary { dataset, config, median, .. } if dataset == name && *config == which => Some(*median),
            _ => None,
        })
    };
    for r in records {
        match r {
            Record::Comparison { dataset, median_difference, ci_low, ci_high } => {
                let a = summary(dataset, Side::A).unwrap_or(f64::NAN);
                let b = summary(dataset, Side::B).unwrap_or(f64::NAN);
                out.push_str(&format!(
                    "{:<32} {:>9.4} {:>9.4} {:>+10.4} {:>21}\n",
                    dataset,
                    a,
                    b,
                    median_difference,
                    format!("[{ci_low:+.4}, {ci_high:+.4}]")
                ));
            }
            Record::Error { dataset, message } => out.push_str(&format!("{dataset:<32} failed: {message}\n")),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn constant_sample_collapses() {
        assert_eq!(bootstrap_median_ci(&[0.7; 12], 1000, 1), (0.7, 0.7));
    }

    #[test]
    fn interval_contains_the_median_and_negates() {
        let values: Vec<f64> = (0..30).map(|i| ((i * 37) % 11) as f64 / 10.0 - 0.5).collect();
        let (lo, hi) = bootstrap_median_ci(&values, 2000, 5);
        let m = median(&values);
        assert!(lo <= m && m <= hi);
        let negated: Vec<f64> = values.iter().map(|v| -v).collect();
        assert_eq!(bootstrap_median_ci(&negated, 2000, 5), (-hi, -lo));
        assert_eq!(median(&negated), -m);
    }

    #[test]
    fn too_few_replicates() {
        let spec = BenchmarkSpec {
            datasets: vec![],
            class_column: "class".into(),
            config_a: RunConfig::default(),
            config_b: RunConfig::default(),
            replicates: 1,
            seed: 0,
            resamples: 10,
        };
        assert!(matches!(run_benchmark(&spec), Err(CliError::Usage(_))));
    }
}
