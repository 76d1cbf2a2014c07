use thiserror::Error;

/// Errors across profile construction, quadrature, geometry and scenario building.
#[derive(Debug, Error)]
pub enum Error {
    #[error("profile has no bands")]
    EmptyProfile,
    #[error("band interval inverted: lo={lo} >= hi={hi}")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("bands overlap: [{0}] and [{1}]")]
    OverlappingBands(String, String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("quadrature tolerance not reached within panel budget ({budget} panels)")]
    ToleranceNotReached { budget: usize },
    #[error("dimension-2 frequency support {max_freq} exceeds cap {cap}; set allow_large_support")]
    FrequencyCapExceeded { max_freq: f64, cap: f64 },
    #[error("path needs a direction but none was supplied")]
    MissingDirection,
    #[error("time {0} outside the valid window for this path")]
    InvalidTime(f64),
    #[error("2^k = {0} intervals exceeds the generation cap")]
    TooManyIntervals(u64),
    #[error("point {0} lies outside every interval of the set")]
    NotInSet(f64),
    #[error("mixed-norm spec out of range: {0}")]
    SpecOutOfRange(String),
    #[error("phase certificate failed: {0}")]
    PhaseCertificateFailed(String),
    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
    #[error("regression needs >= 3 points with distinct abscissae")]
    DegenerateAbscissae,
    #[error("decay ladder needs >= 5 points spanning a decade")]
    DegenerateLadder,
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the CLI maps this error to: 3 for exhausted numeric
    /// budgets, 2 for validation problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ToleranceNotReached { .. } | Error::TooManyIntervals(_) => 3,
            _ => 2,
        }
    }
}
