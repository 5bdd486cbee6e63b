use std::io;

/// Errors returned by the solvers, generators and file readers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("{what} is limited to {limit}, got {got}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported TSPLIB edge weight type `{0}`")]
    UnsupportedEdgeWeight(String),

    #[error("series did not converge after {terms} terms (partial sum {partial})")]
    SeriesNonConvergence {
        terms: usize,
        partial: num_complex::Complex64,
    },

    #[error("eigen-solver did not converge: residual {residual:e} after {iterations} iterations")]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
