use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cube is not weakly interactive")]
    NotWeaklyInteractive,

    #[error("cube is not strongly interactive")]
    NotStronglyInteractive,

    #[error("site {0:?} lies outside the sampled region")]
    OutsideRegion(Vec<i64>),

    #[error("energy {energy} is resonant (distance {distance:e} to the spectrum)")]
    Resonant { energy: f64, distance: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("annuli cover too wide: w(A) = {width} > L - l = {limit}")]
    CoverTooWide { width: usize, limit: usize },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
