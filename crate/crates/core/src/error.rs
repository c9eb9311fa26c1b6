use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the symbolic and numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("identically singular symbol")]
    IdenticallySingular,

    #[error("leading coefficient is singular; infinite eigenvalues not accepted")]
    SingularLeading,

    #[error("clustering ambiguity near {center}: {detail}")]
    ClusteringAmbiguity { center: Complex64, detail: String },

    #[error("point {0} lies within tolerance of two distinct poles")]
    AmbiguousPole(Complex64),

    #[error("not elliptic: {0}")]
    NotElliptic(String),

    #[error("illegal weight shift: {0}")]
    IllegalWeightShift(String),

    #[error("incompatible weights: {0}")]
    Incompatible(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("infinite strip: {0}")]
    InfiniteStrip(String),

    #[error("operator is not block-diagonal in the model basis")]
    NonDiagonal,

    #[error("unknown model: {0}")]
    UnknownModel(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
