use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible spaces: {0}")]
    IncompatibleSpaces(String),
    #[error("cannot normalize the zero state")]
    CannotNormalize,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported mass ratio {m_a}:{m_b} (need small coprime integers r:s with r+s <= 16)")]
    UnsupportedRatio { m_a: f64, m_b: f64 },
    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: String, found: String },
    #[error("resolution too high: {rows}x{cols} matrix exceeds the dense SVD cap")]
    ResolutionTooHigh { rows: usize, cols: usize },
    #[error("operator is not unitary (deviation {0:.3e})")]
    InvalidUnitary(f64),
    #[error("incommensurate transformation: {0}")]
    Commensurability(String),
    #[error("representation law violated: residual {0:.3e}")]
    RepresentationLawViolation(f64),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("relative-momentum lattice is not symmetric under q -> -q")]
    LatticeSymmetry,
    #[error("k = {k} outside table range [{lo}, {hi}]")]
    OutOfRange { k: f64, lo: f64, hi: f64 },
    #[error("phase-shift table has no channel (l={l}, s={s}, j={j})")]
    MissingChannel { l: u32, s: f64, j: f64 },
    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
