//! Deterministic report files: CSV with a header row, 17 significant digits and
//! `\n` line ends; pretty JSON with a schema version.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::experiment::ExperimentSpec;

pub const SCHEMA_VERSION: u32 = 1;

/// Scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let io = |e: csv::Error| CliError::io(path, e.into());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// JSON envelope shared by every command: schema version, command name and the full
/// settings (candidates always as a list).
pub fn envelope(command: &str, spec: &ExperimentSpec, body: Value) -> Value {
    let mut settings = serde_json::Map::new();
    for (k, v) in spec.entries() {
        if k == "candidate" {
            let list = settings.entry(k).or_insert_with(|| json!([]));
            list.as_array_mut().expect("candidate list").push(Value::String(v));
        } else {
            settings.insert(k.to_string(), Value::String(v));
        }
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "settings": settings,
        "result": body,
    })
}

/// Header names for coordinate columns.
pub fn coordinate_header(dim: usize) -> Vec<&'static str> {
    ["x", "y", "z"][..dim].to_vec()
}

pub fn path_in(dir: &Path, file: &str) -> PathBuf {
    dir.join(file)
}
