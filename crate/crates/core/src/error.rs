use thiserror::Error;

/// Library-wide error type. The CLI maps each variant to a fixed exit code,
/// so the split between variants is part of the external contract:
/// `Input` covers malformed data and violated preconditions (exit 2),
/// `Internal` covers broken invariants that should be unreachable from valid
/// inputs (exit 3), and `Undecidable` marks questions the classifier refuses
/// to answer (exit 4).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("internal invariant violation: {0}")]
    Internal(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn undecidable(msg: impl Into<String>) -> Self {
        Error::Undecidable(msg.into())
    }
}
