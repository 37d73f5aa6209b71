//! Run records, manifests, and summary tables.
//!
//! Each run emits one line-delimited JSON file named by the config hash: one
//! self-describing record per round followed by a summary record. Round
//! records carry exactly the fields `round, acc, f1_macro, eps_q, eps_pool,
//! lift, loss0, jsd_boundary, n_labeled, n_unlabeled, strategy, seed_data,
//! seed_model, seed_strategy, config_hash`; undefined metrics serialize as
//! `null`. Records contain no timestamps, so identical configs produce
//! byte-identical files; timestamps and wall-clock live in the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, ExperimentReport};

/// One acquisition round as persisted to the records file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub acc: f64,
    pub f1_macro: f64,
    pub eps_q: f64,
    pub eps_pool: f64,
    pub lift: Option<f64>,
    pub loss0: f64,
    pub jsd_boundary: Option<f64>,
    pub n_labeled: usize,
    pub n_unlabeled: usize,
    pub strategy: String,
    pub seed_data: u64,
    pub seed_model: u64,
    pub seed_strategy: u64,
    pub config_hash: String,
}

/// Trailing record of a records file; distinguished by `record = "summary"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub record: String,
    pub dataset: String,
    pub strategy: String,
    pub seed_data: u64,
    pub seed_model: u64,
    pub seed_strategy: u64,
    pub config_hash: String,
    pub rounds_completed: usize,
    pub early_stop: bool,
    pub mean_acc: f64,
    pub mean_f1_macro: f64,
    pub final_acc: f64,
    pub final_f1_macro: f64,
    /// Full configuration echo (canonical form).
    pub config: serde_json::Value,
}

/// Reproducibility sidecar written next to the records file. Carries the
/// full configuration, so a run can be reproduced from its manifest alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub created_unix_secs: u64,
    pub records_path: PathBuf,
    pub round_wall_clock_secs: Vec<f64>,
    pub audit_violations: Vec<String>,
    pub config: serde_json::Value,
}

/// FNV-1a over the canonicalized (key-sorted) JSON form of the config. The
/// hash depends only on configuration content, never on file formatting.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = canonical_json(config);
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Key-sorted JSON encoding (serde_json maps are BTree-backed, so value
/// conversion sorts object keys).
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("config serializes");
    serde_json::to_string(&v).expect("value serializes")
}

pub fn records_file_name(hash: &str) -> String {
    format!("{hash}.jsonl")
}

pub fn manifest_file_name(hash: &str) -> String {
    format!("{hash}.manifest.json")
}

/// Write the records file and its manifest; returns both paths.
pub fn write_run(dir: &Path, report: &ExperimentReport) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let hash = config_hash(&report.config);
    let records_path = dir.join(records_file_name(&hash));
    let manifest_path = dir.join(manifest_file_name(&hash));

    let file = fs::File::create(&records_path)?;
    let mut w = BufWriter::new(file);
    for round in &report.rounds {
        let record = RoundRecord {
            round: round.round,
            acc: round.acc,
            f1_macro: round.f1_macro,
            eps_q: round.eps_q,
            eps_pool: round.eps_pool,
            lift: round.lift,
            loss0: round.loss0,
            jsd_boundary: round.jsd_boundary,
            n_labeled: round.n_labeled,
            n_unlabeled: round.n_unlabeled,
            strategy: report.config.strategy.clone(),
            seed_data: report.config.seed_data,
            seed_model: report.config.seed_model,
            seed_strategy: report.config.seed_strategy,
            config_hash: hash.clone(),
        };
        serde_json::to_writer(&mut w, &record)?;
        w.write_all(b"\n")?;
    }
    let summary = SummaryRecord {
        record: "summary".to_string(),
        dataset: report.dataset_name.clone(),
        strategy: report.config.strategy.clone(),
        seed_data: report.config.seed_data,
        seed_model: report.config.seed_model,
        seed_strategy: report.config.seed_strategy,
        config_hash: hash.clone(),
        rounds_completed: report.rounds.len(),
        early_stop: report.early_stop,
        mean_acc: report.mean_acc,
        mean_f1_macro: report.mean_f1_macro,
        final_acc: report.final_acc,
        final_f1_macro: report.final_f1_macro,
        config: serde_json::to_value(&report.config)?,
    };
    serde_json::to_writer(&mut w, &summary)?;
    w.write_all(b"\n")?;
    w.flush()?;

    let manifest = RunManifest {
        config_hash: hash,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        records_path: records_path.clone(),
        round_wall_clock_secs: report.round_wall_clock_secs.clone(),
        audit_violations: report.audit_violations.clone(),
        config: serde_json::to_value(&report.config)?,
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok((records_path, manifest_path))
}

/// Parsed contents of one records file.
#[derive(Debug, Clone)]
pub struct RunRecords {
    pub rounds: Vec<RoundRecord>,
    pub summary: SummaryRecord,
}

pub fn read_run(path: &Path) -> Result<RunRecords> {
    let p = path.display().to_string();
    let content = fs::read_to_string(path)?;
    let mut rounds = Vec::new();
    let mut summary = None;
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| Error::data(&p, format!("line {}: {e}", lineno + 1)))?;
        if value.get("record").and_then(|r| r.as_str()) == Some("summary") {
            summary = Some(
                serde_json::from_value(value)
                    .map_err(|e| Error::data(&p, format!("line {}: {e}", lineno + 1)))?,
            );
        } else {
            rounds.push(
                serde_json::from_value(value)
                    .map_err(|e| Error::data(&p, format!("line {}: {e}", lineno + 1)))?,
            );
        }
    }
    let summary = summary.ok_or_else(|| Error::data(&p, "missing summary record"))?;
    Ok(RunRecords { rounds, summary })
}

/// Read every records file (`*.jsonl`) in a directory.
pub fn read_report_dir(dir: &Path) -> Result<Vec<RunRecords>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_run(p)).collect()
}

const ABSENT: &str = "-";

/// Summary tables assembled from a report directory: per-strategy mean/std
/// metric tables, the sampling-error table, and per-round accuracy curves.
#[derive(Debug, Clone)]
pub struct SummaryTables {
    /// Mean accuracy over rounds and seeds, with std over seeds.
    pub accuracy: String,
    /// Mean F1-macro over rounds and seeds, with std over seeds.
    pub f1_macro: String,
    /// eps_q / eps_pool / lift / loss0 means over rounds and seeds.
    pub error_lift: String,
    /// Long-form per-round accuracy curves for external plotting.
    pub curves: String,
}

/// Strategy column order: canonical names first, anything else alphabetical.
fn strategy_order(present: &mut Vec<String>) {
    let canon: Vec<&str> = crate::strategies::ALL_STRATEGY_NAMES.to_vec();
    present.sort_by_key(|s| {
        (
            canon.iter().position(|c| c == s).unwrap_or(canon.len()),
            s.clone(),
        )
    });
    present.dedup();
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(runs: &[RunRecords]) -> SummaryTables {
    let mut datasets: Vec<String> = runs.iter().map(|r| r.summary.dataset.clone()).collect();
    datasets.sort();
    datasets.dedup();
    let mut strategies: Vec<String> = runs.iter().map(|r| r.summary.strategy.clone()).collect();
    strategy_order(&mut strategies);

    // (dataset, strategy) -> per-seed mean metrics.
    let mut acc_cells: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    let mut f1_cells: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let key = (run.summary.dataset.clone(), run.summary.strategy.clone());
        acc_cells
            .entry(key.clone())
            .or_default()
            .push(run.summary.mean_acc);
        f1_cells
            .entry(key)
            .or_default()
            .push(run.summary.mean_f1_macro);
    }
    let metric_table = |cells: &BTreeMap<(String, String), Vec<f64>>| -> String {
        let mut out = String::from("dataset");
        for s in &strategies {
            out.push_str(&format!("\t{s}\t{s}_std"));
        }
        out.push('\n');
        for ds in &datasets {
            out.push_str(ds);
            for s in &strategies {
                match cells.get(&(ds.clone(), s.clone())) {
                    Some(values) => {
                        let (mean, std) = mean_std(values);
                        out.push_str(&format!("\t{mean:.4}\t{std:.4}"));
                    }
                    None => out.push_str(&format!("\t{ABSENT}\t{ABSENT}")),
                }
            }
            out.push('\n');
        }
        out
    };
    let accuracy = metric_table(&acc_cells);
    let f1_macro = metric_table(&f1_cells);

    // Sampling-error diagnostics averaged over rounds and seeds.
    let mut err_cells: BTreeMap<(String, String, &'static str), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let ds = run.summary.dataset.clone();
        let s = run.summary.strategy.clone();
        for round in &run.rounds {
            err_cells
                .entry((ds.clone(), s.clone(), "eps_q"))
                .or_default()
                .push(round.eps_q);
            err_cells
                .entry((ds.clone(), s.clone(), "eps_pool"))
                .or_default()
                .push(round.eps_pool);
            if let Some(lift) = round.lift {
                err_cells
                    .entry((ds.clone(), s.clone(), "lift"))
                    .or_default()
                    .push(lift);
            }
            err_cells
                .entry((ds.clone(), s.clone(), "loss0"))
                .or_default()
                .push(round.loss0);
        }
    }
    let mut error_lift = String::from("dataset\tmetric");
    for s in &strategies {
        error_lift.push_str(&format!("\t{s}"));
    }
    error_lift.push('\n');
    for ds in &datasets {
        for metric in ["eps_q", "eps_pool", "lift", "loss0"] {
            error_lift.push_str(&format!("{ds}\t{metric}"));
            for s in &strategies {
                match err_cells.get(&(ds.clone(), s.clone(), metric)) {
                    Some(values) if !values.is_empty() => {
                        let (mean, _) = mean_std(values);
                        error_lift.push_str(&format!("\t{mean:.4}"));
                    }
                    _ => error_lift.push_str(&format!("\t{ABSENT}")),
                }
            }
            error_lift.push('\n');
        }
    }

    // Per-round accuracy curves (the round-entry evaluations, so the first
    // point is warm-up-only performance).
    let mut curve_cells: BTreeMap<(String, String, usize), Vec<f64>> = BTreeMap::new();
    for run in runs {
        let ds = run.summary.dataset.clone();
        let s = run.summary.strategy.clone();
        for round in &run.rounds {
            curve_cells
                .entry((ds.clone(), s.clone(), round.round))
                .or_default()
                .push(round.acc);
        }
    }
    let mut curves = String::from("dataset\tstrategy\tround\tacc_mean\tacc_std\tn_runs\n");
    for ((ds, s, round), values) in &curve_cells {
        let (mean, std) = mean_std(values);
        curves.push_str(&format!(
            "{ds}\t{s}\t{round}\t{mean:.4}\t{std:.4}\t{}\n",
            values.len()
        ));
    }

    SummaryTables {
        accuracy,
        f1_macro,
        error_lift,
        curves,
    }
}

/// Write the four summary tables into a directory.
pub fn write_tables(tables: &SummaryTables, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let entries = [
        ("accuracy.tsv", &tables.accuracy),
        ("f1_macro.tsv", &tables.f1_macro),
        ("error_lift.tsv", &tables.error_lift),
        ("curves.tsv", &tables.curves),
    ];
    let mut paths = Vec::new();
    for (name, content) in entries {
        let path = dir.join(name);
        fs::write(&path, content)?;
        paths.push(path);
    }
    Ok(paths)
}
