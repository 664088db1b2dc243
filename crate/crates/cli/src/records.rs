//! Output rows and their CSV/JSON sinks.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use treecv::{CvReport, NodeTrace, WorkCounters};

use crate::invalid;

/// One cross-validation run. Column order is the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub row_id: u64,
    /// `ok`, `error` or `budget-exceeded`.
    pub status: String,
    pub source: String,
    pub learner: String,
    pub params: String,
    pub loss: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub scheduler: String,
    pub ordering: String,
    pub strategy: String,
    pub threads: usize,
    pub repetition: usize,
    pub seed: u64,
    pub estimate: Option<f64>,
    /// Semicolon-separated, in chunk order.
    pub per_fold_scores: String,
    pub point_updates: Option<u64>,
    pub snapshots: Option<u64>,
    pub nodes_visited: Option<u64>,
    pub model_transfers: Option<u64>,
    pub evaluations: Option<u64>,
    /// `pass` or `fail` when checked against the replay oracle, else empty.
    pub verified: String,
    pub wall_time_secs: Option<f64>,
    pub message: String,
}

pub const STATUS_OK: &str = "ok";
pub const STATUS_ERROR: &str = "error";
pub const STATUS_BUDGET: &str = "budget-exceeded";

pub const HEADER: &[&str] = &[
    "row_id",
    "status",
    "source",
    "learner",
    "params",
    "loss",
    "n",
    "d",
    "k",
    "scheduler",
    "ordering",
    "strategy",
    "threads",
    "repetition",
    "seed",
    "estimate",
    "per_fold_scores",
    "point_updates",
    "snapshots",
    "nodes_visited",
    "model_transfers",
    "evaluations",
    "verified",
    "wall_time_secs",
    "message",
];

impl RunRecord {
    pub fn fill_report(&mut self, report: &CvReport<f64>) {
        let c = report.counters;
        self.estimate = Some(report.estimate);
        self.per_fold_scores = join_scores(&report.per_fold_scores);
        self.point_updates = Some(c.point_updates);
        self.snapshots = Some(c.snapshots);
        self.nodes_visited = Some(c.nodes_visited);
        self.model_transfers = Some(c.model_transfers);
        self.evaluations = Some(c.evaluations);
        self.wall_time_secs = Some(report.wall_time.as_secs_f64());
    }
}

pub fn join_scores(scores: &[f64]) -> String {
    scores.iter().map(|s| format!("{s:?}")).collect::<Vec<_>>().join(";")
}

pub fn split_scores(text: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(str::parse).collect()
}

/// Appends records to a CSV destination, flushing after every row.
pub struct RecordSink {
    out: csv::Writer<Box<dyn Write>>,
    next_id: u64,
}

impl RecordSink {
    /// Stdout when `path` is `None`. An existing non-empty file must carry
    /// the same header; new rows are appended with ids after its last one.
    pub fn open(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::new(Box::new(io::stdout()), true, 1));
        };
        let mut next_id = 1;
        let mut has_header = false;
        if path.exists() && std::fs::metadata(path)?.len() > 0 {
            let existing = read_records(path)?;
            next_id = existing.iter().map(|r| r.row_id).max().unwrap_or(0) + 1;
            has_header = true;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        Ok(Self::new(Box::new(file), !has_header, next_id))
    }

    pub fn new(out: Box<dyn Write>, write_header: bool, next_id: u64) -> Self {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if write_header {
            out.write_record(HEADER).expect("header write");
        }
        Self { out, next_id }
    }

    /// Assigns the next row id, writes the row and flushes.
    pub fn write(&mut self, record: &mut RunRecord) -> anyhow::Result<()> {
        record.row_id = self.next_id;
        self.next_id += 1;
        self.out.serialize(&*record)?;
        self.out.flush()?;
        Ok(())
    }
}

/// Reads a record file written by [`RecordSink`].
pub fn read_records(path: &Path) -> anyhow::Result<Vec<RunRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut first = String::new();
    BufReader::new(&file).read_line(&mut first)?;
    if first.trim_end() != HEADER.join(",") {
        return Err(invalid(format!("{} is not a run record file (header mismatch)", path.display())));
    }
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|err| invalid(format!("{} row {}: {err}", path.display(), i + 2))))
        .collect()
}

/// JSON mirror of a [`CvReport`], one object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub row_id: u64,
    pub per_fold_scores: Vec<f64>,
    pub estimate: f64,
    pub counters: CountersJson,
    pub wall_time_secs: f64,
    pub scheduler: String,
    pub ordering: String,
    pub seed: u64,
    pub trace: Vec<TraceJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountersJson {
    pub point_updates: u64,
    pub snapshots: u64,
    pub nodes_visited: u64,
    pub model_transfers: u64,
    pub evaluations: u64,
}

impl From<WorkCounters> for CountersJson {
    fn from(c: WorkCounters) -> Self {
        Self {
            point_updates: c.point_updates,
            snapshots: c.snapshots,
            nodes_visited: c.nodes_visited,
            model_transfers: c.model_transfers,
            evaluations: c.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub start: usize,
    pub end: usize,
    pub midpoint: Option<usize>,
    pub points_fed_left: usize,
    pub points_fed_right: usize,
    pub depth: usize,
}

impl From<&NodeTrace> for TraceJson {
    fn from(t: &NodeTrace) -> Self {
        Self {
            start: t.start,
            end: t.end,
            midpoint: t.midpoint,
            points_fed_left: t.points_fed_left,
            points_fed_right: t.points_fed_right,
            depth: t.depth,
        }
    }
}

impl ReportJson {
    pub fn new(row_id: u64, report: &CvReport<f64>) -> Self {
        Self {
            row_id,
            per_fold_scores: report.per_fold_scores.clone(),
            estimate: report.estimate,
            counters: report.counters.into(),
            wall_time_secs: report.wall_time.as_secs_f64(),
            scheduler: report.scheduler.to_string(),
            ordering: report.ordering.to_string(),
            seed: report.seed,
            trace: report.trace.iter().map(TraceJson::from).collect(),
        }
    }
}

/// JSON Lines writer, flushed per report.
pub struct JsonSink {
    out: Box<dyn Write>,
}

impl JsonSink {
    pub fn create(path: &Path) -> anyhow::Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .with_context(|| format!("opening {}", path.display()))?;
        Ok(Self { out: Box::new(file) })
    }

    pub fn write(&mut self, report: &ReportJson) -> anyhow::Result<()> {
        serde_json::to_writer(&mut self.out, report)?;
        self.out.write_all(b"\n")?;
        self.out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_round_trip() {
        let v = vec![0.1, 1.0 / 3.0, 0.0, 1e-300];
        assert_eq!(split_scores(&join_scores(&v)).unwrap(), v);
        assert!(split_scores("").unwrap().is_empty());
    }
}
