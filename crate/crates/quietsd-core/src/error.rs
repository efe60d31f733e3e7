//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("time grid not covered by the sample index range: {0}")]
    GridCoverage(String),

    #[error("orbit diverged: |x| exceeded {0:e}")]
    Divergence(f64),

    #[error("tail cap of {0} extra steps exhausted before the quantizer settled")]
    TailCapExhausted(usize),

    #[error("empty input: {0}")]
    EmptyInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
