use num_complex::Complex64;
use thiserror::Error;

use crate::tensor::Vec3;

#[derive(Debug, Error)]
pub enum Error {
    #[error("wave vector must be nonzero")]
    ZeroWaveVector,
    #[error("frequency must be positive")]
    ZeroFrequency,
    #[error("tensor is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("tensor is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("tensor is not orthogonal (deviation {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },
    #[error("({omega}, |k|={k_norm}) lies outside the tabulated range")]
    OutOfTableRange { omega: f64, k_norm: f64 },
    #[error("quadrature did not converge: relative change {change:.3e} at order {order}")]
    QuadratureNotConverged { change: f64, order: usize },
    #[error("kernel tail has not decayed: |chi(T)|/max|chi| = {ratio:.3e}")]
    TailNotDecayed { ratio: f64 },
    #[error("grid too coarse or malformed: {0}")]
    GridTooCoarse(String),
    #[error("Laplace variable must satisfy Re(rho) > 0, got {0}")]
    LeftHalfPlane(Complex64),
    #[error("Lambda(k, rho) is numerically singular at k={k:?}, rho={rho} (rcond {rcond:.3e})")]
    SingularLambda { k: Vec3, rho: Complex64, rcond: f64 },
    #[error("pole finding failed: {0}")]
    PoleFindingFailed(String),
    #[error("Talbot inversion did not converge at t={t}: change {change:.3e}")]
    TalbotNotConverged { t: f64, change: f64 },
    #[error("medium is not passive: pole with Re(rho) = {max_real:.3e}")]
    NonPassive { max_real: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config validation error at `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(String),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Validation { .. } => 1,
            Error::Io { .. } => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable name used in manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroWaveVector => "ZeroWaveVector",
            Error::ZeroFrequency => "ZeroFrequency",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::NotOrthogonal { .. } => "NotOrthogonal",
            Error::OutOfTableRange { .. } => "OutOfTableRange",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::TailNotDecayed { .. } => "TailNotDecayed",
            Error::GridTooCoarse(_) => "GridTooCoarse",
            Error::LeftHalfPlane(_) => "LeftHalfPlane",
            Error::SingularLambda { .. } => "SingularLambda",
            Error::PoleFindingFailed(_) => "PoleFindingFailed",
            Error::TalbotNotConverged { .. } => "TalbotNotConverged",
            Error::NonPassive { .. } => "NonPassive",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Io { .. } => "IoError",
            Error::Csv(_) => "CsvError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
