//! CSV files: traces, per-step records, cold-start graduations.

use std::fs::{self, File};
use std::path::Path;

use adaptscale_core::engine::{Graduation, StepRecord};
use adaptscale_core::trace::{Archetype, WorkloadTrace};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub const TRACE_HEADER: [&str; 2] = ["step", "rps"];

pub const STEPS_HEADER: [&str; 15] = [
    "step",
    "rps",
    "active",
    "warming",
    "capacity",
    "utilization",
    "latency_ms",
    "violated",
    "violation_fraction",
    "cost",
    "n_reactive",
    "n_pro",
    "target",
    "horizon",
    "adapt_estimate",
];

pub const ADAPT_HEADER: [&str; 4] = ["step", "ordered_step", "count", "observed_seconds"];

/// SHA-256 over the little-endian bytes of every sample: two traces hash
/// equal iff they are bit-identical.
pub fn trace_checksum(trace: &WorkloadTrace) -> String {
    let mut h = Sha256::new();
    for v in &trace.rps {
        h.update(v.to_le_bytes());
    }
    hex::encode(h.finalize())
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
    }
    csv::Writer::from_path(path).map_err(LabError::csv(path))
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(LabError::csv(path))?;
    for row in rows {
        w.write_record(&row).map_err(LabError::csv(path))?;
    }
    w.flush().map_err(LabError::io(path))
}

pub fn write_trace(path: &Path, trace: &WorkloadTrace) -> Result<()> {
    let rows = trace.rps.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]);
    write_rows(path, &TRACE_HEADER, rows)
}

/// Reads a `step,rps` file; steps must run 0, 1, 2, ... without gaps.
pub fn read_trace(path: &Path, archetype: Archetype, seed: u64, step_seconds: f64) -> Result<WorkloadTrace> {
    let parse_err = |message: String| LabError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(LabError::csv(path))?;
    let header = r.headers().map_err(LabError::csv(path))?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(parse_err(format!("expected header `step,rps`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rps = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(LabError::csv(path))?;
        let step: usize = rec[0].trim().parse().map_err(|_| parse_err(format!("row {i}: bad step `{}`", &rec[0])))?;
        if step != i {
            return Err(parse_err(format!("row {i}: expected step {i}, found {step}")));
        }
        let v: f64 = rec[1].trim().parse().map_err(|_| parse_err(format!("row {i}: bad rps `{}`", &rec[1])))?;
        rps.push(v);
    }
    Ok(WorkloadTrace::from_series(archetype, seed, step_seconds, rps)?)
}

fn step_row(r: &StepRecord) -> Vec<String> {
    vec![
        r.step.to_string(),
        r.rps.to_string(),
        r.active.to_string(),
        r.warming.to_string(),
        r.capacity_rps.to_string(),
        r.utilization.to_string(),
        r.latency_ms.to_string(),
        u8::from(r.violated).to_string(),
        r.violation_fraction.to_string(),
        r.cost.to_string(),
        r.n_reactive.to_string(),
        r.n_pro.to_string(),
        r.target.to_string(),
        r.horizon.to_string(),
        r.adapt_estimate.to_string(),
    ]
}

pub fn write_steps(path: &Path, records: &[StepRecord]) -> Result<()> {
    write_rows(path, &STEPS_HEADER, records.iter().map(step_row))
}

pub fn write_graduations(path: &Path, graduations: &[Graduation]) -> Result<()> {
    let rows = graduations.iter().map(|g| {
        vec![
            g.step.to_string(),
            g.ordered_step.to_string(),
            g.count.to_string(),
            g.observed_seconds.to_string(),
        ]
    });
    write_rows(path, &ADAPT_HEADER, rows)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(LabError::io(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(LabError::io(dir))?;
    }
    fs::write(path, text).map_err(LabError::io(path))
}
