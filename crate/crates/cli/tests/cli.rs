use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pipeline_forge::dataset::{make_synthetic, SyntheticKind};
use pipeline_forge::seed;
use pipeline_forge_cli::benchmark::{read_report, recompute_comparisons, Record};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pipeline-forge"));
    cmd.env_remove("PIPELINE_FORGE_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_dataset(dir: &Path, name: &str, kind: SyntheticKind, n: usize) -> PathBuf {
    let path = dir.join(name);
    make_synthetic(kind, n, &mut seed::stream(5, &[])).unwrap().write_csv(&path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sensible_without_blocks_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Xor, 40);
    let out = run(&["optimize", "--data", s(&data), "--init", "sensible", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_flags_and_missing_data() {
    assert_eq!(run(&["optimize", "--pop-size", "x"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = run(&["optimize", "--data", s(&missing), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Xor, 40);
    let out = run(&["optimize", "--data", s(&data), "--class", "label", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["optimize", "--data", s(&data), "--mutation-rate", "1.5", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_generations_reports_initial_best() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Separable2d, 80);
    let out_dir = dir.path().join("run");
    let out = run(&["optimize", "--data", s(&data), "--pop-size", "10", "--generations", "0", "--seed", "3", "--out", s(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("best test balanced accuracy: "));
    let history = std::fs::read_to_string(out_dir.join("history.jsonl")).unwrap();
    assert_eq!(history.lines().count(), 1);
    for name in ["best_pipeline.txt", "best_pipeline_readable.txt", "archive.jsonl"] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
}

#[test]
fn seed_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Xor, 60);
    let go = |out: &Path, env: Option<&str>, flag: Option<&str>| {
        let mut cmd = bin();
        if let Some(v) = env {
            cmd.env("PIPELINE_FORGE_SEED", v);
        }
        cmd.args(["optimize", "--data", s(&data), "--pop-size", "10", "--generations", "2", "--out", s(out)]);
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read_to_string(out.join("history.jsonl")).unwrap()
    };
    let from_env = go(&dir.path().join("a"), Some("7"), None);
    let from_flag = go(&dir.path().join("b"), None, Some("7"));
    assert_eq!(from_env, from_flag);
}

#[test]
fn mining_pipeline_lists() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("pipelines.txt");
    std::fs::write(&list, "# one pipeline\nKNearestNeighbor(k=5, SelectKBest(k=10, StandardScaler(INPUT)))\n").unwrap();
    let vocab = dir.path().join("blocks.txt");
    let out = run(&["mine", "--pipelines", s(&list), "--out", s(&vocab)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&vocab).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.ends_with("\t1")));
    let out = run(&["mine", "--pipelines", s(&list), "--max-n", "1", "--out", s(&vocab)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&vocab).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| !l.contains("->")));
    assert_eq!(run(&["mine", "--out", s(&vocab)]).status.code(), Some(2));
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "\n").unwrap();
    assert_eq!(run(&["mine", "--pipelines", s(&empty), "--out", s(&vocab)]).status.code(), Some(1));
}

#[test]
fn mining_archives_and_seeding_from_them() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Separable2d, 60);
    let mut archives = Vec::new();
    for seed in ["1", "2"] {
        let out_dir = dir.path().join(format!("run{seed}"));
        let out = run(&["optimize", "--data", s(&data), "--pop-size", "10", "--generations", "1", "--seed", seed, "--out", s(&out_dir)]);
        assert!(out.status.success());
        archives.push(out_dir.join("archive.jsonl"));
    }
    let vocab = dir.path().join("blocks.txt");
    let out = run(&["mine", "--archives", s(&archives[0]), s(&archives[1]), "--out", s(&vocab)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "optimize", "--data", s(&data), "--pop-size", "10", "--generations", "1",
        "--init", "sensible", "--blocks", s(&vocab), "--out", s(&dir.path().join("seeded")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn benchmark_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path(), "d.csv", SyntheticKind::Xor, 60);
    let cfg = dir.path().join("a.toml");
    std::fs::write(&cfg, "population_size = 8\ngenerations = 1\n").unwrap();
    let sensible = dir.path().join("b.toml");
    std::fs::write(&sensible, "population_size = 8\ngenerations = 1\ninit = \"sensible\"\nblocks = \"blocks.txt\"\n").unwrap();
    std::fs::write(dir.path().join("blocks.txt"), "PolynomialFeatures -> LogisticRegression\n").unwrap();
    let report = dir.path().join("report.jsonl");
    let missing = dir.path().join("missing.csv");
    let out = run(&[
        "benchmark", "--data", s(&data), s(&missing), "--config-a", s(&cfg), "--config-b", s(&sensible),
        "--replicates", "3", "--resamples", "200", "--out", s(&report), "--seed", "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("failed"));
    let records = read_report(&report).unwrap();
    assert!(records.iter().any(|r| matches!(r, Record::Error { .. })));
    let recomputed = recompute_comparisons(&records);
    assert_eq!(recomputed.len(), 1);
    for r in &records {
        match r {
            Record::Summary { config, median, ci_low, ci_high, accuracies, .. } => {
                let expected = if *config == pipeline_forge_cli::benchmark::Side::A { recomputed[0].1 } else { recomputed[0].2 };
                assert_eq!(*median, expected);
                assert!(ci_low <= median && median <= ci_high);
                assert_eq!(accuracies.len(), 3);
            }
            Record::Comparison { median_difference, .. } => assert_eq!(*median_difference, recomputed[0].3),
            Record::Replicate { seed, replicate, .. } => assert_eq!(*seed, 10 + *replicate as u64),
            Record::Error { .. } => {}
        }
    }
    let out = run(&[
        "benchmark", "--data", s(&data), "--config-a", s(&cfg), "--config-b", s(&cfg),
        "--replicates", "1", "--out", s(&report),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
