use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid topology: {}", .0.join("; "))]
    InvalidTopology(Vec<String>),

    #[error("invalid demand at record {record}: {reason}")]
    InvalidDemand { record: usize, reason: String },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unsupported modulation order {0}")]
    UnsupportedModulation(u32),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("empty sweep range: start {start}, end {end}, step {step}")]
    EmptyRange { start: f64, end: f64, step: f64 },

    #[error("GN model singularity: zero dispersion")]
    ZeroDispersion,

    #[error("invalid traffic input: {0}")]
    Traffic(String),

    #[error("cost break-even undefined: flex plan uses zero lasers")]
    ZeroLasers,

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}
