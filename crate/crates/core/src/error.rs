use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structurally malformed input (bad header, wrong column count, unparsable number).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input parsed but violates a declared invariant.
    #[error("{}", fmt_validation(*.line, .message))]
    Validation {
        line: Option<usize>,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation (negative pixels, zero depth).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("none of the requested landmarks {requested:?} are present in the recording")]
    EmptySelection { requested: Vec<u8> },

    #[error("landmark {landmark}: no samples at or above the confidence threshold")]
    EmptyWaveform { landmark: u8 },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("both groups have zero variance; t statistic is undefined")]
    DegenerateVariance,

    #[error("t-test needs exactly two groups, found {} ({})", .groups.len(), .groups.join(", "))]
    UnsupportedGrouping { groups: Vec<String> },

    #[error("measurement failed: {0}")]
    Measurement(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Any of the above, tagged with the file it came from.
    #[error("{}: {source}", .path.display())]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

fn fmt_validation(line: Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("line {line}: {message}"),
        None => message.to_string(),
    }
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Validation {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn invalid_at(line: usize, message: impl Into<String>) -> Self {
        Error::Validation {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            Error::File { .. } => self,
            other => Error::File {
                path: path.to_path_buf(),
                source: Box::new(other),
            },
        }
    }

    /// The underlying error, with any file tag removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::File { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code for the command-line tool: 2 for bad input, 3 for
    /// failures of the computation itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::Config(_)
            | Error::Domain(_)
            | Error::Io(_) => 2,
            Error::EmptySelection { .. }
            | Error::EmptyWaveform { .. }
            | Error::InsufficientData { .. }
            | Error::DegenerateVariance
            | Error::UnsupportedGrouping { .. }
            | Error::Measurement(_) => 3,
            Error::File { source, .. } => source.exit_code(),
        }
    }
}
