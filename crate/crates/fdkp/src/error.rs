use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("non-finite symbol value at mode ({i}, {j}) with nonzero coefficient")]
    NonFiniteSymbol { i: i64, j: i64 },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("support violation: {0}")]
    Support(String),
    #[error("Picard iteration is not contracting (ratio {ratio:.4} at step {iteration})")]
    NonContraction { ratio: f64, iteration: usize },
    #[error("{stage}: no convergence within {iterations} iterations")]
    MaxIterExceeded { stage: &'static str, iterations: usize },
    #[error("no Nehari point on the ray: {0}")]
    NoNehariPoint(String),
    #[error("line search stalled at iteration {0}")]
    LineSearchStall(usize),
    #[error("descent diverged at iteration {0}")]
    Divergence(usize),
    #[error("linear solve stagnated (relative residual {0:e})")]
    LinearSolveStagnation(f64),
    #[error("Newton iteration did not converge (residual {0:e})")]
    NonConvergence(f64),
    #[error("malformed file {path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of a numerical solver stage.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NonContraction { .. }
                | Error::MaxIterExceeded { .. }
                | Error::NoNehariPoint(_)
                | Error::LineSearchStall(_)
                | Error::Divergence(_)
                | Error::LinearSolveStagnation(_)
                | Error::NonConvergence(_)
        )
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
