//! Error type shared across the crate.
//!
//! Variants are grouped by how the CLI reports them: configuration and
//! usage problems, data/file problems, and numerical failures detected
//! during training. Library callers can match on the variant; the binary
//! maps each group to a distinct process exit code.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length/shape for the operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// A point or vector violated a manifold invariant (off the
    /// hyperboloid, non-positive curvature, arcosh argument below the
    /// clamp window, ...).
    #[error("manifold violation: {0}")]
    Manifold(String),

    /// Invalid configuration or command usage.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent input data (interaction files, knowledge
    /// graph triples, item-entity maps).
    #[error("data error: {0}")]
    Data(String),

    /// A checkpoint file is corrupt or incompatible.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// A non-finite value surfaced during training or evaluation.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI uses for this error class.
    ///
    /// 1 = usage/config, 2 = data or checkpoint problems, 3 = numerical
    /// failure. Success is 0 and is not represented here.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Data(_) | Error::Checkpoint(_) | Error::Io(_) => 2,
            Error::Numerical(_) => 3,
            // Shape and manifold violations inside a run mean the model
            // state has gone bad, which the CLI reports as numerical.
            Error::DimMismatch { .. } | Error::Manifold(_) => 3,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
