use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("table `{table}`, row {row}, column `{column}`: {message}")]
    Parse {
        table: String,
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("join is cyclic; irreducible tables: {}", format_residual(.residual))]
    Cyclic {
        residual: Vec<(String, Vec<String>)>,
    },

    #[error("query error: {0}")]
    Query(String),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("projection {0:?} is not in the domain index")]
    Index(Vec<f64>),

    #[error("join result exceeds cap of {cap} rows")]
    Resource { cap: usize },

    #[error("unsupported model version {0}")]
    Version(u64),

    #[error("malformed model document: {0}")]
    Model(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn format_residual(residual: &[(String, Vec<String>)]) -> String {
    residual
        .iter()
        .map(|(name, cols)| format!("{}({})", name, cols.join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}
