use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("metric definition error: {0}")]
    MetricDefinition(String),

    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular metric: {0}")]
    SingularMetric(String),

    #[error("metric is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("matrix is not orthogonal (defect {0:.3e})")]
    NotOrthogonal(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Input could not be read or understood, as opposed to a failure of the math.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::MetricDefinition(_)
                | Error::UnknownEntry(_)
                | Error::Io(_)
                | Error::IndexOutOfRange { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
