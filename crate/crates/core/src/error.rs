use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spin count {0} outside supported range 1..=6")]
    SpinCount(usize),
    #[error("spin index {spin} out of range for a {n_spins}-spin system")]
    SpinIndex { spin: usize, n_spins: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("target angle {theta} rad outside (0, 2π] for the {family} family")]
    ThetaOutOfDomain { family: &'static str, theta: f64 },
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("family {0} is not supported here")]
    UnsupportedFamily(&'static str),
    #[error("coupling constant must be positive, got {0} Hz")]
    NonPositiveCoupling(f64),
    #[error("invalid spin system: {0}")]
    InvalidSpinSystem(String),
    #[error("no spin of kind {0:?} in the system")]
    UnknownSpinKind(String),
    #[error("negative duration {0}")]
    NegativeDuration(f64),
    #[error("invalid counting problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
