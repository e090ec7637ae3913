use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} lies outside the window [{a}, {b}]")]
    OutOfWindow { t: f64, a: f64, b: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("value {value} at node {index} is outside [0, 1]")]
    ValueOutOfRange { index: usize, value: f64 },

    #[error("window of length {available} is too small; at least {required} is needed")]
    WindowTooSmall { required: f64, available: f64 },

    #[error("insufficient window margin: need {required} beyond the output window, have {available}")]
    InsufficientMargin { required: f64, available: f64 },

    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("epsilon net has {required} elements, above the cap of {cap}")]
    NetTooLarge { required: u128, cap: usize },

    #[error("state {state:?} is outside the domain")]
    OutsideDomain { state: Vec<f64> },

    #[error("trajectory left the domain by {excess} (margin {margin}) at time {t}")]
    InvarianceViolated { t: f64, excess: f64, margin: f64 },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numerical budget or certificate rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvarianceViolated { .. } | Error::CertificationFailed(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
