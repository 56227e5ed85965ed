//! Row writers (CSV or JSON lines) and run manifests.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, mut w: W) -> Result<(), ReportError> {
    match format {
        Format::Csv => {
            let mut cw = csv::Writer::from_writer(w);
            for r in rows {
                cw.serialize(r)?;
            }
            cw.flush()?;
        }
        Format::JsonLines => {
            for r in rows {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// A separation demo or exact identity, one row per instance and metric.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoRecord {
    pub demo: String,
    pub instance: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub bound: f64,
    /// Exact checks fail the run; sampled ones only warn.
    pub exact: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    /// SHA-256 of the config's canonical JSON.
    pub config_hash: String,
    pub rows: usize,
    pub failures: usize,
}

/// Hex SHA-256 of `value` serialized with sorted keys.
pub fn config_hash(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("JSON values serialize");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: u32,
        b: f64,
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_rows(&[Row { a: 1, b: 0.5 }, Row { a: 2, b: 1.0 }], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\n2,1.0\n");
    }

    #[test]
    fn json_lines_one_object_per_line() {
        let mut buf = Vec::new();
        write_rows(&[Row { a: 1, b: 0.5 }], Format::JsonLines, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "{\"a\":1,\"b\":0.5}\n");
    }

    #[test]
    fn hash_ignores_key_order() {
        let a: serde_json::Value = serde_json::from_str(r#"{"x":1,"y":2}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"y":2,"x":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
