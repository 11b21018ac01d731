//! On-disk dataset: `samples.csv`, `summary.json`, `heatmaps/` and `gaps/`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{AlgoId, ScenarioConfig};
use super::recap::RecapRow;
use super::runner::{HeatmapSnapshot, MetricSample, RunLog};
use crate::error::{Error, Result};
use crate::exploration::VisitCounter;

pub const SAMPLES_FILE: &str = "samples.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const HEATMAP_DIR: &str = "heatmaps";
pub const GAPS_DIR: &str = "gaps";

pub const CSV_HEADER: [&str; 11] = [
    "run_id",
    "env",
    "algo",
    "scenario",
    "seed",
    "step",
    "greedy_return",
    "states_discovered",
    "discovery_fraction",
    "msve",
    "optimal_flag",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "both" => Ok(Self::Both),
            _ => Err(Error::Usage(format!("unknown format {s:?} (csv, json, both)"))),
        }
    }
}

/// Final statistics of one run, as stored in the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub run_id: String,
    pub scenario: String,
    pub env: String,
    pub algo: AlgoId,
    pub seed: u64,
    pub budget: usize,
    pub episodes: usize,
    pub final_return: f64,
    pub optimal_return: f64,
    pub success: bool,
    pub final_discovery: f64,
    pub steps_to_learn: Option<usize>,
    pub heatmap_steps: Vec<usize>,
    /// Length of the per-step gap log, when values were tracked.
    pub gap_steps: Option<usize>,
    pub final_counts: VisitCounter,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub configs: Vec<ScenarioConfig>,
    pub recap: Vec<RecapRow>,
    pub runs: Vec<RunSummary>,
}

/// File-name form of a run id.
pub fn sanitize(run_id: &str) -> String {
    run_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn fmt_err(path: &Path, message: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(path, source),
        other => fmt_err(path, format!("{other:?}")),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Writes the dataset under `dir`. CSV output includes the samples, heatmaps
/// and gap logs; JSON output is the summary. Floats use Rust's shortest
/// round-trip formatting so reading them back is bit-exact.
pub fn write_outputs(
    runs: &[RunLog],
    recap: &[RecapRow],
    configs: &[ScenarioConfig],
    dir: &Path,
    format: OutputFormat,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        write_samples(runs, &dir.join(SAMPLES_FILE))?;
        write_heatmaps(runs, &dir.join(HEATMAP_DIR))?;
        write_gaps(runs, &dir.join(GAPS_DIR))?;
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let summary = Summary {
            configs: configs.to_vec(),
            recap: recap.to_vec(),
            runs: runs.iter().map(summarize).collect(),
        };
        let path = dir.join(SUMMARY_FILE);
        let text = serde_json::to_string_pretty(&summary).map_err(|e| fmt_err(&path, e))?;
        write_file(&path, &text)?;
    }
    Ok(())
}

fn summarize(r: &RunLog) -> RunSummary {
    RunSummary {
        run_id: r.run_id.clone(),
        scenario: r.scenario.clone(),
        env: r.env.clone(),
        algo: r.algo,
        seed: r.seed,
        budget: r.budget,
        episodes: r.episodes,
        final_return: r.final_return,
        optimal_return: r.optimal_return,
        success: r.success,
        final_discovery: r.final_discovery,
        steps_to_learn: r.steps_to_learn,
        heatmap_steps: r.heatmaps.iter().map(|h| h.step).collect(),
        gap_steps: r.value_gaps.as_ref().map(Vec::len),
        final_counts: r.final_counts.clone(),
        wall_clock_secs: r.wall_clock_secs,
    }
}

fn write_samples(runs: &[RunLog], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_err(path, e))?;
    for r in runs {
        for m in &r.samples {
            let flag = match m.optimal_at_state {
                Some(true) => "1".to_string(),
                Some(false) => "0".to_string(),
                None => String::new(),
            };
            w.write_record([
                r.run_id.clone(),
                r.env.clone(),
                r.algo.to_string(),
                r.scenario.clone(),
                r.seed.to_string(),
                m.step.to_string(),
                m.greedy_return.to_string(),
                m.states_discovered.to_string(),
                m.discovery_fraction.to_string(),
                m.msve.map(|x| x.to_string()).unwrap_or_default(),
                flag,
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn heatmap_path(dir: &Path, run_id: &str, step: usize) -> PathBuf {
    dir.join(format!("{}_step{}.csv", sanitize(run_id), step))
}

fn write_heatmaps(runs: &[RunLog], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for r in runs {
        for h in &r.heatmaps {
            let text: String = h
                .grid
                .iter()
                .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(",") + "\n")
                .collect();
            write_file(&heatmap_path(dir, &r.run_id, h.step), &text)?;
        }
    }
    Ok(())
}

/// Sparse form: `step,gap` for every nonzero gap.
fn write_gaps(runs: &[RunLog], dir: &Path) -> Result<()> {
    let tracked: Vec<_> = runs.iter().filter(|r| r.value_gaps.is_some()).collect();
    if tracked.is_empty() {
        return Ok(());
    }
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for r in tracked {
        let mut text = String::from("step,gap\n");
        for (t, g) in r.value_gaps.as_ref().unwrap().iter().enumerate() {
            if *g != 0.0 {
                text.push_str(&format!("{t},{g}\n"));
            }
        }
        write_file(&dir.join(format!("{}.csv", sanitize(&r.run_id))), &text)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    run_id: String,
    #[allow(dead_code)]
    env: String,
    #[allow(dead_code)]
    algo: String,
    #[allow(dead_code)]
    scenario: String,
    #[allow(dead_code)]
    seed: u64,
    step: usize,
    greedy_return: f64,
    states_discovered: usize,
    discovery_fraction: f64,
    msve: Option<f64>,
    optimal_flag: Option<u8>,
}

/// Reads back the samples CSV as (run_id, sample) pairs in file order.
pub fn read_samples(path: &Path) -> Result<Vec<(String, MetricSample)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(fmt_err(path, format!("unexpected header {headers:?}")));
    }
    let mut out = Vec::new();
    for row in r.deserialize::<SampleRow>() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let flag = match row.optimal_flag {
            None => None,
            Some(0) => Some(false),
            Some(1) => Some(true),
            Some(x) => return Err(fmt_err(path, format!("optimal_flag {x}"))),
        };
        out.push((
            row.run_id,
            MetricSample {
                step: row.step,
                greedy_return: row.greedy_return,
                states_discovered: row.states_discovered,
                discovery_fraction: row.discovery_fraction,
                msve: row.msve,
                optimal_at_state: flag,
            },
        ));
    }
    Ok(out)
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| fmt_err(path, e))
}

pub fn read_heatmap(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|x| x.trim().parse::<u64>().map_err(|e| fmt_err(path, e)))
                .collect()
        })
        .collect()
}

fn read_gaps(path: &Path, len: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut gaps = vec![0.0; len];
    for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
        let (t, g) = line.split_once(',').ok_or_else(|| fmt_err(path, line))?;
        let t: usize = t.parse().map_err(|e| fmt_err(path, e))?;
        let g: f64 = g.parse().map_err(|e| fmt_err(path, e))?;
        *gaps.get_mut(t).ok_or_else(|| fmt_err(path, format!("step {t} out of range")))? = g;
    }
    Ok(gaps)
}

/// Rebuilds the full dataset from a directory written with [`OutputFormat::Both`].
pub fn read_outputs(dir: &Path) -> Result<(Vec<RunLog>, Summary)> {
    let summary = read_summary(&dir.join(SUMMARY_FILE))?;
    let samples = read_samples(&dir.join(SAMPLES_FILE))?;
    let mut runs = Vec::with_capacity(summary.runs.len());
    for s in &summary.runs {
        let heatmaps = s
            .heatmap_steps
            .iter()
            .map(|&step| {
                Ok(HeatmapSnapshot {
                    step,
                    grid: read_heatmap(&heatmap_path(&dir.join(HEATMAP_DIR), &s.run_id, step))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let value_gaps = match s.gap_steps {
            Some(n) => Some(read_gaps(&dir.join(GAPS_DIR).join(format!("{}.csv", sanitize(&s.run_id))), n)?),
            None => None,
        };
        runs.push(RunLog {
            run_id: s.run_id.clone(),
            scenario: s.scenario.clone(),
            env: s.env.clone(),
            algo: s.algo,
            seed: s.seed,
            budget: s.budget,
            episodes: s.episodes,
            samples: samples
                .iter()
                .filter(|(id, _)| *id == s.run_id)
                .map(|(_, m)| m.clone())
                .collect(),
            final_counts: s.final_counts.clone(),
            heatmaps,
            final_return: s.final_return,
            optimal_return: s.optimal_return,
            success: s.success,
            final_discovery: s.final_discovery,
            steps_to_learn: s.steps_to_learn,
            value_gaps,
            wall_clock_secs: s.wall_clock_secs,
        });
    }
    Ok((runs, summary))
}
