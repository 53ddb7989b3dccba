use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("base station and UAV positions coincide")]
    CoincidentPoints,

    #[error("degenerate link: {0}")]
    DegenerateLink(&'static str),

    #[error("malformed antenna pattern: {0}")]
    MalformedPattern(String),

    #[error("received power must be positive and finite, got {0} dBm")]
    NonPositivePower(f64),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate geometry: all UAV samples share one position")]
    DegenerateGeometry,

    #[error("least-squares system is rank deficient (singular value ratio {0:.3e})")]
    RankDeficient(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("degenerate trajectory: {0}")]
    DegenerateTrajectory(&'static str),

    #[error("schema error{}: {msg}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Schema { row: Option<usize>, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure class, used by the CLI to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn schema(row: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Schema { row, msg: msg.into() }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_) => ErrorClass::Usage,
            Error::MalformedPattern(_)
            | Error::EmptyInput
            | Error::InsufficientSamples { .. }
            | Error::DegenerateTrajectory(_)
            | Error::Schema { .. }
            | Error::Config(_)
            | Error::Io(_) => ErrorClass::Data,
            Error::CoincidentPoints
            | Error::DegenerateLink(_)
            | Error::NonPositivePower(_)
            | Error::DegenerateGeometry
            | Error::RankDeficient(_) => ErrorClass::Numerical,
        }
    }
}
