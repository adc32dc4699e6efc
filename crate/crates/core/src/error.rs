use thiserror::Error;

/// Errors raised by assembly, the sub-solvers and the time steppers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("{solver} did not converge after {iterations} iterations (last gap {gap:e})")]
    NonConverged {
        solver: &'static str,
        iterations: usize,
        gap: f64,
    },

    #[error("damage substep failed: {0}")]
    ZetaSubstepFailed(Box<Error>),

    #[error("element {element} has a non-positive Jacobian ({det:e})")]
    SingularElement { element: usize, det: f64 },

    #[error("no boundary segment carries tag {0}")]
    UnknownTag(String),

    #[error("scheme not applicable: {0}")]
    SchemeNotApplicable(String),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
