//! Per-replication records and per-cell summaries as CSV.
//!
//! The records file starts with the columns
//! `graphon,n,xi_target,m0,method,rep,covered,total_length,hull_length,is_trivial,time_ms,seed`
//! followed by `truth,bound,intervals,error`. `intervals` lists the prediction
//! set as `lo:hi` pairs joined by `;`, so coverage can be recomputed from the
//! file alone. Floats are written in shortest round-trip form.

use std::io::{Read, Write};
use std::path::Path;

use matconf_core::conformal::Interval;
use matconf_core::simgen::Graphon;
use serde::{Deserialize, Serialize};

use crate::config::Method;

/// Bumped whenever [`RECORD_HEADER`] changes.
pub const RECORD_SCHEMA_VERSION: u32 = 1;

pub const RECORD_HEADER: [&str; 16] = [
    "graphon",
    "n",
    "xi_target",
    "m0",
    "method",
    "rep",
    "covered",
    "total_length",
    "hull_length",
    "is_trivial",
    "time_ms",
    "seed",
    "truth",
    "bound",
    "intervals",
    "error",
];

pub const SUMMARY_HEADER: [&str; 16] = [
    "graphon",
    "n",
    "xi_target",
    "m0",
    "method",
    "bound",
    "replications",
    "failures",
    "coverage",
    "coverage_se",
    "mean_total_length",
    "median_total_length",
    "mean_hull_length",
    "median_hull_length",
    "trivial_rate",
    "mean_time_ms",
];

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("records header column {index} is {found:?}, expected {expected:?} (schema version {RECORD_SCHEMA_VERSION})")]
    Header {
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("records header has {found} columns, expected {}", RECORD_HEADER.len())]
    HeaderLength { found: usize },
    #[error("record on line {line}: invalid {column}: {value:?}")]
    Value {
        line: u64,
        column: &'static str,
        value: String,
    },
    #[error("no records to summarize")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub graphon: Graphon,
    pub n: usize,
    pub xi_target: f64,
    pub m0: usize,
    pub method: Method,
    pub rep: usize,
    pub covered: bool,
    pub total_length: f64,
    pub hull_length: f64,
    pub is_trivial: bool,
    pub time_ms: f64,
    pub seed: u64,
    pub truth: f64,
    pub bound: f64,
    pub intervals: Vec<Interval>,
    /// Set when the replication failed; the metrics are then meaningless.
    pub error: Option<String>,
}

impl Record {
    /// Whether `truth` lies in the recorded intervals.
    pub fn recomputed_coverage(&self) -> bool {
        self.intervals.iter().any(|iv| iv.contains(self.truth))
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Serialize, Deserialize)]
struct RecordRow {
    graphon: String,
    n: usize,
    xi_target: f64,
    m0: usize,
    method: String,
    rep: usize,
    covered: bool,
    total_length: f64,
    hull_length: f64,
    is_trivial: bool,
    time_ms: f64,
    seed: u64,
    truth: f64,
    bound: f64,
    intervals: String,
    error: String,
}

pub fn format_intervals(intervals: &[Interval]) -> String {
    intervals
        .iter()
        .map(|iv| format!("{}:{}", iv.lo, iv.hi))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_intervals(text: &str) -> Option<Vec<Interval>> {
    if text.is_empty() {
        return Some(Vec::new());
    }
    text.split(';')
        .map(|part| {
            let (lo, hi) = part.split_once(':')?;
            Some(Interval {
                lo: lo.parse().ok()?,
                hi: hi.parse().ok()?,
            })
        })
        .collect()
}

pub fn write_records<W: Write>(records: &[Record], writer: W) -> Result<(), RecordsError> {
    let mut wtr = csv::Writer::from_writer(writer);
    if records.is_empty() {
        wtr.write_record(RECORD_HEADER)?;
    }
    for r in records {
        wtr.serialize(RecordRow {
            graphon: r.graphon.name().to_owned(),
            n: r.n,
            xi_target: r.xi_target,
            m0: r.m0,
            method: r.method.name().to_owned(),
            rep: r.rep,
            covered: r.covered,
            total_length: r.total_length,
            hull_length: r.hull_length,
            is_trivial: r.is_trivial,
            time_ms: r.time_ms,
            seed: r.seed,
            truth: r.truth,
            bound: r.bound,
            intervals: format_intervals(&r.intervals),
            error: r.error.clone().unwrap_or_default(),
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_records_path(records: &[Record], path: &Path) -> Result<(), RecordsError> {
    write_records(records, std::fs::File::create(path)?)
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<Record>, RecordsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() != RECORD_HEADER.len() {
        return Err(RecordsError::HeaderLength {
            found: header.len(),
        });
    }
    for (index, (found, expected)) in header.iter().zip(RECORD_HEADER).enumerate() {
        if found != expected {
            return Err(RecordsError::Header {
                index: index + 1,
                expected,
                found: found.to_owned(),
            });
        }
    }
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: RecordRow = row?;
        let line = out.len() as u64 + 2;
        let bad = |column: &'static str, value: &str| RecordsError::Value {
            line,
            column,
            value: value.to_owned(),
        };
        out.push(Record {
            graphon: Graphon::from_name(&row.graphon)
                .ok_or_else(|| bad("graphon", &row.graphon))?,
            method: Method::from_name(&row.method).ok_or_else(|| bad("method", &row.method))?,
            intervals: parse_intervals(&row.intervals)
                .ok_or_else(|| bad("intervals", &row.intervals))?,
            n: row.n,
            xi_target: row.xi_target,
            m0: row.m0,
            rep: row.rep,
            covered: row.covered,
            total_length: row.total_length,
            hull_length: row.hull_length,
            is_trivial: row.is_trivial,
            time_ms: row.time_ms,
            seed: row.seed,
            truth: row.truth,
            bound: row.bound,
            error: (!row.error.is_empty()).then_some(row.error),
        });
    }
    Ok(out)
}

pub fn read_records_path(path: &Path) -> Result<Vec<Record>, RecordsError> {
    read_records(std::fs::File::open(path)?)
}

/// Statistics of one cell. Failed replications are counted but excluded
/// from every other column; those columns are `None` when nothing succeeded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub graphon: String,
    pub n: usize,
    pub xi_target: f64,
    pub m0: usize,
    pub method: String,
    pub bound: f64,
    pub replications: usize,
    pub failures: usize,
    pub coverage: Option<f64>,
    /// Binomial standard error `sqrt(p (1 − p) / k)`.
    pub coverage_se: Option<f64>,
    pub mean_total_length: Option<f64>,
    pub median_total_length: Option<f64>,
    pub mean_hull_length: Option<f64>,
    pub median_hull_length: Option<f64>,
    pub trivial_rate: Option<f64>,
    pub mean_time_ms: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    })
}

/// One row per cell, in order of first appearance.
pub fn summarize(records: &[Record]) -> Result<Vec<SummaryRow>, RecordsError> {
    if records.is_empty() {
        return Err(RecordsError::Empty);
    }
    let key = |r: &Record| (r.graphon, r.n, r.xi_target.to_bits(), r.m0, r.method);
    let mut keys = Vec::new();
    for r in records {
        if !keys.contains(&key(r)) {
            keys.push(key(r));
        }
    }
    Ok(keys
        .into_iter()
        .map(|k| {
            let group: Vec<&Record> = records.iter().filter(|r| key(r) == k).collect();
            let ok: Vec<&Record> = group.iter().copied().filter(|r| !r.failed()).collect();
            let collect = |f: fn(&Record) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let covered = collect(|r| r.covered as u8 as f64);
            let total = collect(|r| r.total_length);
            let hull = collect(|r| r.hull_length);
            let coverage = mean(&covered);
            let first = group[0];
            SummaryRow {
                graphon: first.graphon.name().to_owned(),
                n: first.n,
                xi_target: first.xi_target,
                m0: first.m0,
                method: first.method.name().to_owned(),
                bound: first.bound,
                replications: group.len(),
                failures: group.len() - ok.len(),
                coverage,
                coverage_se: coverage.map(|p| (p * (1.0 - p) / ok.len() as f64).sqrt()),
                mean_total_length: mean(&total),
                median_total_length: median(&total),
                mean_hull_length: mean(&hull),
                median_hull_length: median(&hull),
                trivial_rate: mean(&collect(|r| r.is_trivial as u8 as f64)),
                mean_time_ms: mean(&collect(|r| r.time_ms)),
            }
        })
        .collect())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], writer: W) -> Result<(), RecordsError> {
    let mut wtr = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        wtr.write_record(SUMMARY_HEADER)?;
    }
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_summary_path(rows: &[SummaryRow], path: &Path) -> Result<(), RecordsError> {
    write_summary(rows, std::fs::File::create(path)?)
}
