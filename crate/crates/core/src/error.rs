use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2, 4, 8 or 16)")]
    UnsupportedDim(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed subsystem specification: {0}")]
    MalformedDims(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotAState(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("closed form not available for partition {0}")]
    NoClosedForm(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("empty record set")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
