use thiserror::Error;

/// Failure taxonomy shared across the library.
///
/// The CLI maps these to exit codes: `Usage` is a caller mistake, `Parse` is
/// malformed input data, the rest are runtime failures.
#[derive(Debug, Error)]
pub enum Error {
    /// An API precondition was violated (bad parameter, mismatched overlay
    /// goal, non-positive optimal cost, ...).
    #[error("usage: {0}")]
    Usage(String),

    /// Malformed input text; `line` is 1-based where a line is known.
    #[error("parse error (line {line}): {msg}")]
    Parse { line: usize, msg: String },

    /// Random sampling could not satisfy its constraints within the retry
    /// budget (e.g. not enough reachable states, no solvable problems).
    #[error("sampling: {0}")]
    Sampling(String),

    /// Offline database construction failed.
    #[error("database build: {0}")]
    Build(String),

    /// A correlation is undefined because one rank vector has zero variance.
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    /// Equal-frequency binning collapsed below two usable bins.
    #[error("degenerate bins: {0}")]
    DegenerateBins(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
