use thiserror::Error;

/// Errors raised across design, analysis, quantization and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A value does not fit the chosen fixed-point storage.
    #[error("range error: {0}")]
    Range(String),
    /// Evaluation point coincides with a pole.
    #[error("singularity: {0}")]
    Singularity(String),
    /// A response curve does not contain the feature being measured.
    #[error("measurement error: {0}")]
    Measurement(String),
    /// Malformed text input, with the 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Structurally valid input the pipeline cannot process (wrong WAV layout, rate mismatch).
    #[error("format error: {0}")]
    Format(String),
    /// Bad command-line argument value.
    #[error("argument error: {0}")]
    Argument(String),
    /// A filter section failed the stability check.
    #[error("stability failure: {0}")]
    Unstable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) => 2,
            Error::Unstable(_) => 4,
            _ => 3,
        }
    }
}
