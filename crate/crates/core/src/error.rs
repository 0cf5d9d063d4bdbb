use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A word or symbol did not fit the alphabet or shape an operation expects.
    #[error("input error: {0}")]
    Input(String),

    #[error("regex syntax error at position {pos}: {msg}")]
    RegexSyntax { pos: usize, msg: String },

    /// A transducer failed well-formedness or normalization checks.
    #[error("validation error: {0}")]
    Validation(String),

    /// Counter-set periodicity could not be certified at the given cap.
    #[error("certification failed at counter cap {cap}: {msg}; rerun with a larger --counter-cap")]
    Certification { cap: u64, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal invariant did not hold. Signals a bug.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("fixture line {line}: {msg}")]
    Fixture { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
