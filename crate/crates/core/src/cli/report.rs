//! Report files: per-row CSV tables and JSON summaries, written atomically.
//!
//! Floats in CSV use 17 significant digits, so re-reading is exact.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{Check, ErrorEstimate, OracleComparison, SimulationReport, StepRecord};
use crate::gates::GateCounts;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize, column: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {line}, column {column}: not a number: {s:?}")))
}

const STEP_COLUMNS: [&str; 10] = [
    "step",
    "t",
    "total_energy",
    "field_energy",
    "polarization",
    "magnetization",
    "p0",
    "cumulative_p0",
    "p0_min",
    "p0_max",
];

/// Initial row (step 0) followed by one row per step.
pub fn steps_to_csv(rows: &[StepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(STEP_COLUMNS).map_err(csv_error)?;
    for r in rows {
        let mut fields = vec![r.step.to_string()];
        fields.extend(
            [
                r.t,
                r.total_energy,
                r.field_energy,
                r.polarization,
                r.magnetization,
                r.p0,
                r.cumulative_p0,
                r.p0_min,
                r.p0_max,
            ]
            .map(fmt_f64),
        );
        w.write_record(&fields).map_err(csv_error)?;
    }
    into_string(w)
}

pub fn steps_from_csv(text: &str) -> Result<Vec<StepRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.iter().ne(STEP_COLUMNS) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = i + 2;
        let step = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {line}, column step: not an integer")))?;
        let f = |k: usize| parse_f64(&rec[k], line, STEP_COLUMNS[k]);
        rows.push(StepRecord {
            step,
            t: f(1)?,
            total_energy: f(2)?,
            field_energy: f(3)?,
            polarization: f(4)?,
            magnetization: f(5)?,
            p0: f(6)?,
            cumulative_p0: f(7)?,
            p0_min: f(8)?,
            p0_max: f(9)?,
        });
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Structured summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub dt: f64,
    pub steps: usize,
    pub t_total: f64,
    pub gate_level: bool,
    pub dimension: usize,
    pub qubits: usize,
    pub initial: StepRecord,
    pub last: StepRecord,
    pub oracle: Option<OracleComparison>,
    pub gate_counts: Option<GateCounts>,
    pub expansion_rule: Option<String>,
    pub error_estimate: Option<ErrorEstimate>,
    /// Which norm the measured error uses.
    pub error_norm: String,
    pub stopped_at: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl RunSummary {
    pub fn from_report(report: &SimulationReport, dimension: usize, qubits: usize) -> Self {
        Self {
            method: report.method.name().to_string(),
            dt: report.dt,
            steps: report.steps,
            t_total: report.dt * report.steps as f64,
            gate_level: report.gate_level,
            dimension,
            qubits,
            initial: report.initial.clone(),
            last: report
                .records
                .last()
                .cloned()
                .unwrap_or_else(|| report.initial.clone()),
            oracle: report.oracle.clone(),
            gate_counts: report.gate_counts,
            expansion_rule: report
                .gate_counts
                .map(|_| crate::dilation_kraus::EXPANSION_RULE.to_string()),
            error_estimate: report.error_estimate,
            error_norm: "operator 2-norm".to_string(),
            stopped_at: report.stopped_at,
            checks: report.checks.clone(),
            passed: report.passed(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// `base.csv` / `base.json` style siblings.
pub fn with_extension(base: &Path, ext: &str) -> PathBuf {
    let mut name = base.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}
