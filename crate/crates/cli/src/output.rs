use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::experiment::{RunRecord, Summary};
use saris_core::ScenarioConfig;

/// SHA-256 of the canonical text form of the configuration.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(cfg.serialize().as_bytes()))
}

#[derive(Serialize)]
struct TraceRow<'a> {
    algo: &'a str,
    seed: u64,
    iter: usize,
    smse: f64,
    sum_rate: f64,
}

#[derive(Serialize)]
struct RunRow<'a> {
    algo: &'a str,
    seed: u64,
    realization: u64,
    final_sum_rate: f64,
    final_smse: f64,
    iterations: usize,
    converged: bool,
    wall_time_s: f64,
    config_hash: &'a str,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub var: String,
    pub value: String,
    pub algo: &'static str,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub mean_iters: f64,
    pub mean_time_s: f64,
}

fn write_csv<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

pub fn trace_file_name(r: &RunRecord) -> String {
    format!("{}-{:06}.csv", r.algo.name(), r.realization)
}

/// `traces/<algo>-<realization>.csv`, `runs.csv` and `summary.csv`.
pub fn write_run_outputs(dir: &Path, records: &[RunRecord], summary: &[Summary], hash: &str) -> io::Result<()> {
    let traces = dir.join("traces");
    fs::create_dir_all(&traces)?;
    for r in records {
        let rows = r.smse.iter().zip(&r.sum_rate).enumerate().map(|(i, (s, q))| TraceRow {
            algo: r.algo.name(),
            seed: r.seed,
            iter: i,
            smse: *s,
            sum_rate: *q,
        });
        write_csv(&traces.join(trace_file_name(r)), rows)?;
    }
    write_csv(
        &dir.join("runs.csv"),
        records.iter().map(|r| RunRow {
            algo: r.algo.name(),
            seed: r.seed,
            realization: r.realization,
            final_sum_rate: r.final_rate(),
            final_smse: r.final_smse(),
            iterations: r.iterations,
            converged: r.converged,
            wall_time_s: r.wall_time_s,
            config_hash: hash,
        }),
    )?;
    write_csv(&dir.join("summary.csv"), summary)
}

pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> io::Result<()> {
    write_csv(&dir.join("sweep.csv"), rows)
}

pub fn write_metadata(dir: &Path, meta: &serde_json::Value) -> io::Result<()> {
    let text = serde_json::to_string_pretty(meta).map_err(io::Error::other)?;
    fs::write(dir.join("metadata.json"), text + "\n")
}
