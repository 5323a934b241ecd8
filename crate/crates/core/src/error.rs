use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by oracles, sets, solvers and the benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A point outside the domain of a function (or of `omega`/`omega_star`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller broke an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A numerical invariant that should hold by construction did not.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("backtracking did not terminate after {0} increases of the Lipschitz estimate")]
    Nontermination(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("no problem reaches relative error {0:e} for any method")]
    EmptyAverage(f64),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
