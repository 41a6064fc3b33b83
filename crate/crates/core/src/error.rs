use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has non-finite or malformed entries: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("class {0} has no samples")]
    EmptyClass(u8),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPSD(f64),

    #[error("class {class} has non-positive correlation trace {trace:e}")]
    DegenerateTrace { class: u8, trace: f64 },

    #[error("zero signal cannot be normalized{}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    ZeroSignal { line: Option<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("invalid label {label:?} at line {line} (expected 1 or 2)")]
    LabelError { line: usize, label: String },

    #[error("not a projector: {0}")]
    NotProjector(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
