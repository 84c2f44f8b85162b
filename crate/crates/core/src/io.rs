//! On-disk formats: diagnostics CSV, binary grid snapshots and JSON
//! summaries.
//!
//! Snapshot layout (little endian): magic `ZKBS`, `u32` format version,
//! `u32 nx`, `u32 ny`, then `nx * ny` `f64` grid values in row-major order
//! (`x` index outer, `y` index inner).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::domain::{DomainConfig, GridField};
use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"ZKBS";
pub const SNAPSHOT_VERSION: u32 = 1;

pub const DIAGNOSTICS_COLUMNS: [&str; 8] = ["t", "l2", "h1", "h2", "diss_l2", "diss_h1", "nonlin_flux", "step_iters"];

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Per-step diagnostics. `diss_l2` and `diss_h1` are the dissipation rates
/// `2 delta ||Du||^2` and `2 delta int (u_xx^2 + 2 u_xy^2 + u_yy^2)`; the
/// latter is empty when not recorded.
pub fn write_diagnostics<W: Write>(out: W, traj: &Trajectory, delta: f64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGNOSTICS_COLUMNS).map_err(csv_error)?;
    for g in &traj.diagnostics {
        let diss_h1 = g.diss1.map(|v| (2.0 * delta * v).to_string()).unwrap_or_default();
        w.write_record([
            g.t.to_string(),
            g.l2.to_string(),
            g.h1.to_string(),
            g.h2.to_string(),
            (2.0 * delta * g.diss0).to_string(),
            diss_h1,
            g.nonlin_flux.to_string(),
            g.step_iters.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics_file(path: &Path, traj: &Trajectory, delta: f64) -> Result<()> {
    write_diagnostics(BufWriter::new(File::create(path)?), traj, delta)
}

/// Write any serializable rows as CSV with a header.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot<W: Write>(mut out: W, field: &GridField) -> Result<()> {
    let (nx, ny) = field.values.dim();
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    out.write_all(&(nx as u32).to_le_bytes())?;
    out.write_all(&(ny as u32).to_le_bytes())?;
    for v in field.values.iter() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<GridField> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[0..4] != SNAPSHOT_MAGIC {
        return Err(Error::Parse("not a ZKBS snapshot".into()));
    }
    let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().expect("4 bytes"));
    let version = word(4);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Parse(format!("unsupported snapshot version {version}")));
    }
    let (nx, ny) = (word(8) as usize, word(12) as usize);
    let mut bytes = vec![0u8; nx * ny * 8];
    input.read_exact(&mut bytes)?;
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let values = Array2::from_shape_vec((nx, ny), values).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(GridField::new(values))
}

#[derive(Debug, Serialize)]
struct SnapshotIndexRow {
    step: usize,
    t: f64,
    file: String,
}

/// Write every stored snapshot as `snap_<step>.zkbs` plus `snapshots.csv`.
pub fn write_snapshots(dir: &Path, traj: &Trajectory, d: &DomainConfig) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rows = Vec::with_capacity(traj.snapshots.len());
    for snap in &traj.snapshots {
        let file = format!("snap_{:07}.zkbs", snap.step);
        let grid = d.to_grid(&snap.field)?;
        write_snapshot(BufWriter::new(File::create(dir.join(&file))?), &grid)?;
        rows.push(SnapshotIndexRow {
            step: snap.step,
            t: snap.t,
            file,
        });
    }
    write_rows(&dir.join("snapshots.csv"), &rows)
}

/// One named pass/fail check in a summary.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value >= limit,
        }
    }

    /// Passes when `lo <= value <= hi`; `limit` records the upper end.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: hi,
            passed: value >= lo && value <= hi,
        }
    }
}

/// Machine-readable outcome of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub details: serde_json::Value,
}

impl Summary {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            passed: true,
            checks: Vec::new(),
            notes: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
