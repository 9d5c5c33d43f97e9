//! On-disk formats: MFS1 and CSV signals, JSON pyramids and measures.

use std::fs;
use std::path::Path;

use mfleaders::measures::{BAdicMeasure, MeasureFile};
use mfleaders::wavelet::{CoefficientPyramid, PyramidFile};
use serde_json::Value;

use crate::CliError;

pub const MFS1_MAGIC: &[u8; 4] = b"MFS1";
pub const MFS1_VERSION: u32 = 1;
const MFS1_HEADER: usize = 16;

/// Magic, u32 version, u64 count, then little-endian f64 samples.
pub fn encode_mfs1(samples: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(MFS1_HEADER + 8 * samples.len());
    out.extend_from_slice(MFS1_MAGIC);
    out.extend_from_slice(&MFS1_VERSION.to_le_bytes());
    out.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

pub fn decode_mfs1(bytes: &[u8]) -> Result<Vec<f64>, CliError> {
    let bad = |offset: usize, what: String| CliError::Format { offset, message: what };
    if bytes.len() < MFS1_HEADER {
        return Err(bad(bytes.len(), format!("header needs {MFS1_HEADER} bytes, file has {}", bytes.len())));
    }
    if &bytes[..4] != MFS1_MAGIC {
        return Err(bad(0, format!("bad magic {:?}", &bytes[..4])));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != MFS1_VERSION {
        return Err(bad(4, format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = bytes.len() - MFS1_HEADER;
    if body as u64 != count.saturating_mul(8) {
        return Err(bad(
            MFS1_HEADER + body - body % 8,
            format!("header declares {count} samples, body holds {} bytes", body),
        ));
    }
    Ok(bytes[MFS1_HEADER..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

/// One header line, then one sample per line in shortest round-trip form.
pub fn encode_csv(samples: &[f64]) -> String {
    let mut s = String::from("value\n");
    for v in samples {
        s.push_str(&format!("{v:?}\n"));
    }
    s
}

pub fn decode_csv(text: &str) -> Result<Vec<f64>, CliError> {
    let mut offset = 0;
    let mut out = Vec::new();
    for (n, line) in text.split_inclusive('\n').enumerate() {
        let field = line.trim();
        if n > 0 && !field.is_empty() {
            let v = field.split(',').next().unwrap_or("").trim();
            out.push(v.parse::<f64>().map_err(|_| CliError::Format {
                offset,
                message: format!("line {}: cannot parse {v:?} as a number", n + 1),
            })?);
        }
        offset += line.len();
    }
    Ok(out)
}

/// Anything the analysis commands accept.
#[derive(Debug, Clone)]
pub enum Input {
    Signal(Vec<f64>),
    Pyramid(CoefficientPyramid),
    Measure(BAdicMeasure),
}

pub fn read_input(path: &Path) -> Result<Input, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(MFS1_MAGIC) {
        return decode_mfs1(&bytes).map(Input::Signal);
    }
    let text = String::from_utf8(bytes).map_err(|e| CliError::Format {
        offset: e.utf8_error().valid_up_to(),
        message: "neither MFS1 nor UTF-8 text".into(),
    })?;
    if !text.trim_start().starts_with('{') {
        return decode_csv(&text).map(Input::Signal);
    }
    let json_err = |e: serde_json::Error| CliError::Format {
        offset: line_offset(&text, e.line(), e.column()),
        message: e.to_string(),
    };
    let v: Value = serde_json::from_str(&text).map_err(json_err)?;
    if v.get("J").is_some() {
        let f: PyramidFile = serde_json::from_value(v).map_err(json_err)?;
        Ok(Input::Pyramid(CoefficientPyramid::from_file(f)?))
    } else if v.get("b").is_some() {
        let f: MeasureFile = serde_json::from_value(v).map_err(json_err)?;
        Ok(Input::Measure(BAdicMeasure::from_file(f)?))
    } else {
        Err(CliError::Format {
            offset: 0,
            message: "JSON is neither a pyramid (key J) nor a measure (key b)".into(),
        })
    }
}

fn line_offset(text: &str, line: usize, column: usize) -> usize {
    text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum::<usize>() + column.saturating_sub(1)
}
