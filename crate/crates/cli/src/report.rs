use std::io::Write;

use hhcert_core::{Error, Result};
use serde::Serialize;

use crate::config::{Config, Format};

/// Envelope shared by every command. Field order is the key order in JSON.
#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub version: &'static str,
    pub command: &'a str,
    pub passed: bool,
    pub config: &'a Config,
    pub result: T,
}

pub fn render_json<T: Serialize>(report: &Report<'_, T>) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(report)
        .map_err(|e| Error::InvalidArgument(format!("cannot serialize report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

pub fn render_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgument(format!("cannot write csv: {e}")))?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidArgument(format!("cannot write csv: {e}")))
}

/// Writes the report in the configured format, to `--out` or stdout.
pub fn emit<T: Serialize, R: Serialize>(report: &Report<'_, T>, csv_rows: &[R]) -> Result<()> {
    let bytes = match report.config.output.format {
        Format::Json => render_json(report)?,
        Format::Csv => render_csv(csv_rows)?,
    };
    match &report.config.output.path {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| Error::InvalidArgument(format!("cannot write to stdout: {e}"))),
    }
}
