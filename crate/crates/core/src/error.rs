use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("partitions have different totals ({left} vs {right})")]
    TotalMismatch { left: u32, right: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("matrix does not preserve the forms of the space")]
    NotIsometry,

    #[error("epsilon invariant undefined at i = {0}: i must be even with positive multiplicity")]
    EpsilonUndefined(u32),

    #[error("space carries no quadratic form")]
    NoQuadraticForm,

    #[error("invalid formed space: {0}")]
    InvalidSpace(String),

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("invalid cycle type: {0}")]
    InvalidCycleType(String),

    #[error("invalid flag: {0}")]
    InvalidFlag(String),

    #[error("no coordinate flag satisfies the incidence conditions for cycle type {0}")]
    FlagSearchExhausted(String),

    #[error("dimension {0} exceeds the 64-bit packed enumeration limit")]
    TooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
