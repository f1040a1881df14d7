use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e}, scale {scale:e})")]
    NotHermitian { deviation: f64, scale: f64 },

    #[error("degenerate spectrum at s = {s}: gap {gap:e}")]
    Degenerate { s: f64, gap: f64 },

    #[error(
        "eigenstate track under-resolved between s = {s0} and s = {s1} (overlap {overlap:.3}); increase grid points"
    )]
    GaugeDiscontinuity { s0: f64, s1: f64, overlap: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("integration monitor violated at step {step} (s = {s}): {what}; try doubling the number of steps")]
    Monitor { step: usize, s: f64, what: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown preset `{0}` (expected one of lz, hadamard, phase, pi8, cnot)")]
    UnknownPreset(String),

    #[error("scenario point protocol={protocol} tau={tau} alpha={alpha} failed")]
    Scenario {
        protocol: String,
        tau: f64,
        alpha: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed config: {0}")]
    Config(serde_json::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
