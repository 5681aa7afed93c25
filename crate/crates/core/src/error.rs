use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("breakdown: {0}")]
    Breakdown(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("QR iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("start vector has zero norm")]
    ZeroVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The small side of an indefinite spectrum carries a root whose pof
    /// exceeds the abort limit; the caller should retry at a lower degree.
    #[error("degree too high: small-side log10 pof {log10_pof:.2} exceeds {limit}")]
    DegreeTooHigh { log10_pof: f64, limit: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported Matrix Market header: {0}")]
    Unsupported(String),

    #[error("operator has no known spectrum")]
    UnknownSpectrum,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
