//! Dataset writers: CSV with a fixed numeric format and the JSON envelope.
//!
//! Every file is written with LF line endings and UTF-8; floats carry 12
//! significant digits so reruns with the same configuration are
//! byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// JSON envelope version for all emitted files.
pub const SCHEMA_VERSION: &str = "1";

/// Formats a float with 12 significant digits, plain decimal notation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

/// Buffered CSV writer with a mandatory header row.
pub struct CsvFile {
    path: PathBuf,
    buffer: String,
    columns: usize,
}

impl CsvFile {
    pub fn new(path: PathBuf, header: &[&str]) -> Self {
        let mut buffer = String::new();
        buffer.push_str(&header.join(","));
        buffer.push('\n');
        CsvFile {
            path,
            buffer,
            columns: header.len(),
        }
    }

    /// Appends one row; the field count must match the header.
    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "CSV row width mismatch");
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn write(self) -> Result<PathBuf, CliError> {
        write_bytes(&self.path, self.buffer.as_bytes())?;
        Ok(self.path)
    }
}

/// The JSON envelope: schema version, resolved configuration, results.
#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    schema_version: &'static str,
    config: &'a C,
    results: &'a R,
}

pub fn write_json<C: Serialize, R: Serialize>(
    path: PathBuf,
    config: &C,
    results: &R,
) -> Result<PathBuf, CliError> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        config,
        results,
    };
    let mut body = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    body.push('\n');
    write_bytes(&path, body.as_bytes())?;
    Ok(path)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(bytes)?;
    Ok(())
}
