//! End-to-end checks of the command-line surface: exit codes, file outputs,
//! sweep resumability, and summary tables.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_real-al"))
}

fn gen_data(path: &Path, per_class: usize, seed: u64) {
    let out = bin()
        .args([
            "gen-data",
            "--classes",
            "3",
            "--dim",
            "6",
            "--per-class",
            &per_class.to_string(),
            "--overlap",
            "0.15",
            "--seed",
            &seed.to_string(),
            "--out",
        ])
        .arg(path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_rounds_plus_summary_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.tsv");
    gen_data(&data, 100, 1);
    let out_dir = dir.path().join("reports");
    let out = bin()
        .args(["run", "--dataset"])
        .arg(&data)
        .args([
            "--strategy", "real", "--rounds", "3", "--budget", "15", "--warmup", "15",
            "--clusters", "8", "--out-dir",
        ])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let records: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    assert_eq!(records.len(), 1);
    let content = fs::read_to_string(&records[0]).unwrap();
    let lines: Vec<&str> = content.lines().collect();
    // 3 rounds + 1 summary.
    assert_eq!(lines.len(), 4);
    assert!(lines[3].contains("\"record\":\"summary\""));
    assert!(lines[3].contains("\"mean_acc\""));
    // The default K is echoed in the summary's config.
    assert!(lines[3].contains("\"clusters\":8"));

    let manifests: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".manifest.json"))
        .collect();
    assert_eq!(manifests.len(), 1);
}

#[test]
fn default_cluster_count_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.tsv");
    gen_data(&data, 120, 2);
    let out_dir = dir.path().join("reports");
    // --clusters omitted: the default 25 must appear in the summary config.
    let out = bin()
        .args(["run", "--dataset"])
        .arg(&data)
        .args(["--strategy", "real", "--rounds", "2", "--budget", "10", "--warmup", "10", "--out-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let records: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    let content = fs::read_to_string(&records[0]).unwrap();
    assert!(content.lines().last().unwrap().contains("\"clusters\":25"));
}

#[test]
fn contract_violations_exit_2_and_runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.tsv");
    gen_data(&data, 80, 3);

    // bald on a softmax classifier: contract error, exit 2.
    let out = bin()
        .args(["run", "--dataset"])
        .arg(&data)
        .args(["--strategy", "bald", "--out-dir"])
        .arg(dir.path().join("r1"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("mlp"));

    // Unknown strategy: exit 2.
    let out = bin()
        .args(["run", "--dataset"])
        .arg(&data)
        .args(["--strategy", "coreset", "--out-dir"])
        .arg(dir.path().join("r2"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Out-of-range generator flag: exit 2.
    let out = bin()
        .args(["gen-data", "--overlap", "1.5", "--out"])
        .arg(dir.path().join("x.tsv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Missing dataset file: runtime failure, exit 1.
    let out = bin()
        .args(["run", "--dataset"])
        .arg(dir.path().join("missing.tsv"))
        .args(["--strategy", "real", "--out-dir"])
        .arg(dir.path().join("r3"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));

    // Malformed dataset contents: runtime failure, exit 1.
    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "# n=2 d=1 y=2\n0.5\t0\n0.7\t9\n").unwrap();
    let out = bin()
        .args(["run", "--dataset"])
        .arg(&bad)
        .args(["--strategy", "real", "--out-dir"])
        .arg(dir.path().join("r4"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("label 9 out of range"));
}

#[test]
fn sweep_is_resumable_and_summarize_builds_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.tsv");
    gen_data(&data, 100, 4);
    let out_dir = dir.path().join("reports");
    let sweep_file = dir.path().join("sweep.json");
    fs::write(
        &sweep_file,
        format!(
            r#"{{
  "datasets": ["{}"],
  "strategies": ["real", "random"],
  "seeds": [1, 2],
  "rounds": 2,
  "budget": 10,
  "warmup": 10,
  "clusters": 8,
  "val_size": 30,
  "test_size": 60
}}"#,
            data.display()
        ),
    )
    .unwrap();

    let sweep = |expect_completed: &str, expect_skipped: &str| {
        let out = bin()
            .args(["sweep", "--config"])
            .arg(&sweep_file)
            .args(["--out-dir"])
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
        assert!(
            stdout.contains(expect_completed) && stdout.contains(expect_skipped),
            "{stdout}"
        );
    };

    // 2 strategies x 2 seeds = 4 runs, then a full skip, then exactly one
    // recomputation after deleting one records file.
    sweep("4 completed", "0 skipped");
    let records: Vec<_> = fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    assert_eq!(records.len(), 4);
    sweep("0 completed", "4 skipped");
    fs::remove_file(&records[0]).unwrap();
    sweep("1 completed", "3 skipped");

    let out = bin()
        .args(["summarize", "--reports"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let accuracy = fs::read_to_string(out_dir.join("accuracy.tsv")).unwrap();
    assert!(accuracy.starts_with("dataset\treal\treal_std\trandom\trandom_std"));
    assert_eq!(accuracy.lines().count(), 2);
    for name in ["f1_macro.tsv", "error_lift.tsv", "curves.tsv"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }

    // Re-summarizing produces identical tables.
    let before = fs::read_to_string(out_dir.join("accuracy.tsv")).unwrap();
    let out = bin()
        .args(["summarize", "--reports"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let after = fs::read_to_string(out_dir.join("accuracy.tsv")).unwrap();
    assert_eq!(before, after);
}

#[test]
fn gen_data_binary_and_text_agree() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("d.tsv");
    let binary = dir.path().join("d.bin");
    for (path, format) in [(&text, "text"), (&binary, "binary")] {
        let out = bin()
            .args([
                "gen-data", "--classes", "2", "--dim", "3", "--per-class", "40", "--seed", "11",
                "--format", format, "--out",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    // Same seed, both formats: same labels and close features (f32 rounding).
    let t = real_al::dataset::load_dataset(&text, real_al::dataset::DatasetFormat::Text).unwrap();
    let b =
        real_al::dataset::load_dataset(&binary, real_al::dataset::DatasetFormat::Binary).unwrap();
    assert_eq!(t.labels, b.labels);
    for (x, y) in t.features.data().iter().zip(b.features.data()) {
        assert!((x - y).abs() < 1e-6);
    }
}
