use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("division by zero in coupling denominator ({0})")]
    DivisionByZero(&'static str),

    #[error("degenerate coupling: chi1 = 0, ratio |chi2/chi1| undefined")]
    DegenerateCoupling,

    /// |chi2| <= |chi1|: the three-mode dynamics are not periodic.
    #[error("protocol undefined for r = {r} (requires r > 1)")]
    ProtocolUndefined { r: f64 },

    #[error("infinite squeezing at r = 1")]
    InfiniteSqueezing,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("invalid mode selection: {0}")]
    InvalidModes(String),

    #[error("unphysical state: smallest symplectic eigenvalue {0:.3e} < 1")]
    Unphysical(f64),

    #[error("truncation leakage {leakage:.3e} exceeds tolerance {tolerance:.1e} (mode {mode}, dim {dim})")]
    Truncation {
        leakage: f64,
        tolerance: f64,
        mode: usize,
        dim: usize,
    },

    #[error("regime check failed: {0}")]
    RegimeViolation(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("config is missing required key(s): {0}")]
    MissingKeys(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
