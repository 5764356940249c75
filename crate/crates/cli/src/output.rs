//! CSV traces and JSON reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use qsub::prelude::IterationTrace;
use serde::Serialize;

use crate::error::CliError;

pub const TRACE_COLUMNS: [&str; 8] = [
    "k",
    "f_value",
    "gap",
    "dist",
    "dist_sq",
    "stepsize",
    "step_length",
    "h1_residual",
];

/// Seventeen significant digits, enough to round-trip any `f64`.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace_to<W: Write>(trace: &IterationTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            sci(r.f_value),
            sci(r.gap),
            sci(r.dist),
            sci(r.dist_sq()),
            sci(r.stepsize),
            sci(r.step_length),
            sci(r.h1_residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &IterationTrace, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trace_to(trace, BufWriter::new(file)).map_err(|e| CliError::Csv {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}
