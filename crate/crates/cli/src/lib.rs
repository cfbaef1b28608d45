//! Command implementations behind the `partialcp` binary.
//!
//! Every command returns a [`Report`]: text for standard output, an
//! optional JSON document for `--out`, and whether a negative finding was
//! made. The binary maps findings to exit code 2 and errors to exit code 1.

pub mod cases;
pub mod commands;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use cases::{run_case, CaseName, CaseOptions, CaseResult, Expectation};
pub use commands::{check, domain, reduce, DomainOptions, ReduceOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: partialcp::Error,
    },
    #[error(transparent)]
    Core(#[from] partialcp::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: serde_json::Value,
    /// A negative verdict was reached (exit code 2).
    pub negative: bool,
}

impl Report {
    pub fn new(text: String, json: impl Serialize, negative: bool) -> Self {
        Self {
            text,
            json: serde_json::to_value(json).expect("report serializes"),
            negative,
        }
    }
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Attaches the file name to a parse or validation error.
pub(crate) fn with_path<T>(path: &Path, r: partialcp::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// `t0:t1:steps` (inclusive, `steps` points) or a single time.
pub fn parse_times(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("invalid time specification '{spec}', expected t0:t1:steps"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [t] => Ok(vec![t.trim().parse().map_err(|_| bad())?]),
        [a, b, n] => {
            let t0: f64 = a.trim().parse().map_err(|_| bad())?;
            let t1: f64 = b.trim().parse().map_err(|_| bad())?;
            let steps: usize = n.trim().parse().map_err(|_| bad())?;
            if steps == 0 || !t0.is_finite() || !t1.is_finite() {
                return Err(bad());
            }
            if steps == 1 {
                return Ok(vec![t0]);
            }
            Ok((0..steps)
                .map(|k| t0 + (t1 - t0) * k as f64 / (steps - 1) as f64)
                .collect())
        }
        _ => Err(bad()),
    }
}

/// `x,y,z` ray direction.
pub fn parse_ray(spec: &str) -> CliResult<partialcp::BlochVector> {
    let v: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("invalid ray '{spec}', expected x,y,z")))?;
    match v.as_slice() {
        [x, y, z] if (x * x + y * y + z * z) > 0.0 => Ok(partialcp::BlochVector::new(*x, *y, *z)),
        _ => Err(CliError::Usage(format!("invalid ray '{spec}', expected a nonzero x,y,z"))),
    }
}
