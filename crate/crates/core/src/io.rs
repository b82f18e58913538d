//! File formats: front and trace CSVs, metrics and profile JSON.
//!
//! CSV files start with the line `# fd-schema v1`. Every file is written to a
//! temporary sibling first and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dominance::{FrontSet, Provenance};
use crate::driver::{IterationRecord, StopReason};
use crate::error::{FdError, Result};
use crate::metrics::{Images, ProfileCurve, ProfileMetric};
use crate::problem::EvalCounters;

pub const SCHEMA_HEADER: &str = "# fd-schema v1";

fn format_error(path: &Path, reason: impl Into<String>) -> FdError {
    FdError::Format {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| format_error(path, "not a file path"))?;
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn with_header(body: Vec<u8>) -> Vec<u8> {
    let mut out = format!("{SCHEMA_HEADER}\n").into_bytes();
    out.extend(body);
    out
}

/// Strips the schema line, rejecting other versions.
fn body_of<'a>(path: &Path, text: &'a str) -> Result<&'a str> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    match first.trim_end() {
        SCHEMA_HEADER => Ok(rest),
        line if line.starts_with("# fd-schema") => {
            Err(format_error(path, format!("unsupported schema `{line}`")))
        }
        _ => Err(format_error(
            path,
            format!("missing `{SCHEMA_HEADER}` header line"),
        )),
    }
}

/// Front CSV text: `x_1..x_n, f_1..f_m, provenance`.
pub fn front_to_csv(front: &FrontSet) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = front.iter().next() {
        let header = (1..=first.x.len())
            .map(|i| format!("x_{i}"))
            .chain((1..=first.fx.len()).map(|j| format!("f_{j}")))
            .chain(std::iter::once("provenance".to_string()));
        w.write_record(header)?;
    }
    for e in front.iter() {
        let row =
            e.x.iter()
                .chain(e.fx.iter())
                .map(|v| v.to_string())
                .chain(std::iter::once(e.provenance.to_string()));
        w.write_record(row)?;
    }
    let body = w.into_inner().map_err(|e| FdError::Io(e.into_error()))?;
    Ok(with_header(body))
}

pub fn write_front_csv(path: &Path, front: &FrontSet) -> Result<()> {
    write_atomic(path, &front_to_csv(front)?)
}

/// One row of a front file. `x` is empty for image-only files.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRow {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub provenance: Option<Provenance>,
}

/// Reads a front CSV. Only the `f_*` columns are required, so fronts exported
/// by other solvers can be imported.
pub fn read_front_csv(path: &Path) -> Result<Vec<FrontRow>> {
    let text = fs::read_to_string(path)?;
    let body = body_of(path, &text)?;
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let headers = r.headers()?.clone();
    let columns = |prefix: &str| -> Vec<usize> {
        let mut cols: Vec<(usize, usize)> = headers
            .iter()
            .enumerate()
            .filter_map(|(c, h)| {
                h.strip_prefix(prefix)
                    .and_then(|i| i.parse().ok())
                    .map(|i| (i, c))
            })
            .collect();
        cols.sort_unstable();
        cols.into_iter().map(|(_, c)| c).collect()
    };
    let (xc, fc) = (columns("x_"), columns("f_"));
    if fc.is_empty() {
        return Err(format_error(path, "no f_* columns"));
    }
    let pc = headers.iter().position(|h| h == "provenance");
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let num = |c: &usize| -> Result<f64> {
            record
                .get(*c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| format_error(path, format!("bad number in data row {}", line + 1)))
        };
        let provenance = match pc.and_then(|c| record.get(c)) {
            Some(s) => Some(
                s.parse()
                    .map_err(|_| format_error(path, format!("bad provenance `{s}`")))?,
            ),
            None => None,
        };
        rows.push(FrontRow {
            x: xc.iter().map(num).collect::<Result<_>>()?,
            f: fc.iter().map(num).collect::<Result<_>>()?,
            provenance,
        });
    }
    Ok(rows)
}

/// Images of a front file.
pub fn read_front_images(path: &Path) -> Result<Images> {
    Ok(read_front_csv(path)?.into_iter().map(|r| r.f).collect())
}

/// Trace CSV text, one row per record. Elapsed times are not written.
pub fn trace_to_csv(trace: &[IterationRecord]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for rec in trace {
        w.serialize(rec)?;
    }
    let body = w.into_inner().map_err(|e| FdError::Io(e.into_error()))?;
    Ok(with_header(body))
}

pub fn write_trace_csv(path: &Path, trace: &[IterationRecord]) -> Result<()> {
    write_atomic(path, &trace_to_csv(trace)?)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<IterationRecord>> {
    let text = fs::read_to_string(path)?;
    let body = body_of(path, &text)?;
    let mut r = csv::Reader::from_reader(body.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Per-run metrics file. Purity needs other solvers' fronts and is left
/// empty until profiles are built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub purity: Option<f64>,
    pub gamma_spread: f64,
    pub delta_spread: f64,
    pub hypervolume: f64,
    pub evals: EvalCounters,
    pub wall_time: f64,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub front_size: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// Profile file: breakpoints `[τ, ρ]` per solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub metric: ProfileMetric,
    pub instances: Vec<String>,
    pub profiles: BTreeMap<String, Vec<[f64; 2]>>,
}

impl ProfileFile {
    pub fn new(metric: ProfileMetric, instances: Vec<String>, curves: &[ProfileCurve]) -> Self {
        let profiles = curves
            .iter()
            .map(|c| (c.solver.clone(), c.breakpoints.clone()))
            .collect();
        Self {
            metric,
            instances,
            profiles,
        }
    }

    /// `solver,tau,rho` rows.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["solver", "tau", "rho"])?;
        for (solver, points) in &self.profiles {
            for [tau, rho] in points {
                w.write_record([solver.clone(), tau.to_string(), rho.to_string()])?;
            }
        }
        let body = w.into_inner().map_err(|e| FdError::Io(e.into_error()))?;
        Ok(with_header(body))
    }
}
