use std::fmt;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("element {element} has a singular Jacobian: {reason}")]
    SingularElement { element: String, reason: String },

    #[error("symmetry reduction rejected: {0}")]
    Asymmetric(String),

    #[error("interface surfaces do not match: unmatched nodes {0:?}")]
    UnmatchedSurface(Vec<usize>),

    #[error("{location}: {message}")]
    Document { location: Location, message: String },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// 1-based line/column into a model document.
#[derive(Debug, Clone, Copy, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

// Locations are metadata; two parsed documents are equal regardless of where
// their values came from.
impl PartialEq for Location {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("non-finite {what}: {values:?}")))
    }
}
