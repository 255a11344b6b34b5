use thiserror::Error;

/// Errors raised by the core solver and its diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("|xi| = {radius} lies outside the tabulated range [{min}, {max}]")]
    OutOfRange { radius: f64, min: f64, max: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel of width {width:.3e} is unresolved on spacing {spacing:.3e} (need width >= 4h)")]
    Unresolved { width: f64, spacing: f64 },

    #[error("initial datum is under-resolved: spectral tail {tail:.3e} exceeds 1e-8 of the peak")]
    UnderResolvedData { tail: f64 },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("blow-up at t = {t}: sup |u| = {sup:.6e} exceeds 10 |u_0|_inf")]
    BlowUp { t: f64, sup: f64 },

    #[error("non-finite values produced at t = {t}")]
    StepControl { t: f64 },

    #[error("Picard iteration stopped contracting (ratio >= 1 three times); horizon {horizon} too large")]
    HorizonTooLarge { horizon: f64 },

    #[error("Picard iteration did not converge within {max_iter} iterations (last distance {distance:.3e})")]
    NoConvergence { max_iter: usize, distance: f64 },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("mass normalisation undefined: M(0) = 0")]
    ZeroInitialMass,

    #[error("trajectory did not complete")]
    IncompleteTrajectory,

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
