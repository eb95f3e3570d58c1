use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular quaternion: |det| = {det_abs:e}")]
    SingularQuaternion { det_abs: f64 },
    #[error("element is not in Sp(4,R): membership residual {residual:e}")]
    NotInGroup { residual: f64 },
    #[error("singular denominator in the domain action: |det| = {det_abs:e}")]
    SingularDenominator { det_abs: f64 },
    #[error("point is not in the Cartan domain (largest eigenvalue of ZZ^dagger = {max_eig})")]
    NotInDomain { max_eig: f64 },
    #[error("point is not a pure quaternion: |z4| = {w4_abs:e}")]
    NotPure { w4_abs: f64 },
    #[error("|mu nu| must equal 1, got {value}")]
    DeterminantNotOne { value: f64 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid lambda {0}: Gamma(2 lambda - 1) has a pole")]
    InvalidLambda(f64),
    #[error("truncated series did not converge: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TruncationNotConverged { tail: f64, tol: f64 },
    #[error("representation label out of regime: need varsigma > s + 2, got varsigma = {varsigma}, s = {spin}")]
    OutOfRegime { varsigma: f64, spin: f64 },
    #[error("singular block: {0}")]
    SingularBlock(String),
    #[error("insufficient Monte Carlo samples: {got} < {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
