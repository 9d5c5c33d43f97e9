//! JSON report helpers. Non-finite numbers are written as the strings `"inf"`, `"-inf"`
//! and `"nan"` so that reports stay valid JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "mfl";

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// Inverse of [`num`].
pub fn parse_num(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// Provenance block embedded in every output.
pub fn meta(c: &ExperimentConfig) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "config_hash": c.hash(),
        "seed": c.seed,
    })
}

/// Prepends the provenance block to a JSON object.
pub fn stamped(c: &ExperimentConfig, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("meta".into(), meta(c));
    if let Value::Object(o) = body {
        m.extend(o);
    }
    Value::Object(m)
}

pub fn write_json(path: &Path, v: &Value) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Validation(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// CSV with a provenance comment line, one header line with units, then rows.
pub fn write_csv(path: &Path, c: &ExperimentConfig, header: &str, rows: &[Vec<f64>]) -> Result<PathBuf, CliError> {
    let mut s = format!(
        "# {TOOL} {} config_hash={} seed={}\n{header}\n",
        env!("CARGO_PKG_VERSION"),
        c.hash(),
        c.seed
    );
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| csv_cell(*x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    write_bytes(path, s.as_bytes())
}

fn csv_cell(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        _ => format!("{x:?}"),
    }
}
