use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("phase is undefined for orthogonal states")]
    UndefinedPhase,

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max |H_ij - conj(H_ji)| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("unknown initial Hamiltonian kind `{0}` (expected hopping, coherent-like, diagonal, random)")]
    UnknownKind(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("time {t} outside schedule window [0, {total}]")]
    TimeOutOfRange { t: f64, total: f64 },

    #[error("invalid step control: {0}")]
    StepControl(String),

    #[error("schedule variant mismatch: expected {expected}")]
    VariantMismatch { expected: &'static str },

    #[error("reference evolution drifted at t = {t}: {what} = {value:e} exceeds {limit:e}")]
    ReferenceDrift {
        t: f64,
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("trajectories are not aligned: {0}")]
    Misaligned(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("LAPACK routine {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
