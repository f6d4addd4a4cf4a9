use thiserror::Error;

use crate::fit::FitResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sector with {modes} modes and {photons} photons has {size} states, above the cap of {cap}")]
    SectorTooLarge {
        modes: usize,
        photons: usize,
        size: u128,
        cap: usize,
    },

    #[error("sector mismatch: ({0}, {1}) vs ({2}, {3})")]
    SectorMismatch(usize, usize, usize, usize),

    #[error("mode count mismatch: expected {expected}, got {got}")]
    ModeMismatch { expected: usize, got: usize },

    #[error("mode index {index} out of range for {dim} modes")]
    InvalidMode { index: usize, dim: usize },

    #[error("element acts twice on mode {0}")]
    RepeatedMode(usize),

    #[error("reflectivity {0} outside [0, 1]")]
    InvalidReflectivity(f64),

    #[error("matrix is not unitary (max |U†U - I| = {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("columns are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("permanent of a {dim}x{dim} matrix exceeds the dimension cap of {cap}")]
    PermanentTooLarge { dim: usize, cap: usize },

    #[error("herald probability {0:e} is too small for the herald to fire")]
    HeraldNeverFires(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("fit did not converge after {} iterations", .0.iterations)]
    NotConverged(Box<FitResult>),

    #[error("undefined operating point: sin(N*phi) = 0")]
    UndefinedOperatingPoint,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure classes, used by the command-line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) => ErrorClass::Io,
            Error::InvalidArgument(_)
            | Error::Config(_)
            | Error::Schema(_)
            | Error::InvalidMode { .. }
            | Error::RepeatedMode(_)
            | Error::InvalidReflectivity(_)
            | Error::ModeMismatch { .. }
            | Error::SectorMismatch(..)
            | Error::UndefinedOperatingPoint => ErrorClass::Usage,
            Error::SectorTooLarge { .. }
            | Error::NotUnitary { .. }
            | Error::NotOrthonormal { .. }
            | Error::PermanentTooLarge { .. }
            | Error::HeraldNeverFires(_)
            | Error::DegenerateData(_)
            | Error::NotConverged(_) => ErrorClass::Numerical,
        }
    }
}
