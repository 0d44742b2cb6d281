use thiserror::Error;

use crate::cones::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated an operation precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A curvature vector lies outside the open cone on which the speed is defined.
    #[error("curvature vector outside the cone: {0}")]
    OutsideCone(Violation),

    /// A function was evaluated outside its domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two principal curvatures are too close for the simple-eigenvalue formula.
    #[error("degenerate eigenvalues: |lambda[{i}] - lambda[{j}]| = {gap:e} below relative gap 1e-10")]
    DegenerateEigenvalues { i: usize, j: usize, gap: f64 },

    /// Rejection sampling found no point inside a cone.
    #[error("empty cone: no sample out of {samples} satisfied {what}")]
    EmptyCone { samples: usize, what: String },

    /// A grid function left the admissible band of the Picard space.
    #[error("grid function leaves the admissible band at r = {r}: {detail}")]
    BandViolation { r: f64, detail: String },

    /// The Picard iteration stopped contracting.
    #[error("contraction failure after {iteration} iterations (ratio {ratio}); try a smaller R")]
    ContractionFailure { iteration: usize, ratio: f64 },

    #[error("no convergence after {iterations} iterations (last sup change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
