use thiserror::Error;

/// Raised when a domain would become empty. Propagation unwinds on this
/// signal and the search backtracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("domain wipe-out")]
pub struct Inconsistency;

/// Errors raised while building a model, before any search happens.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("empty range [{lo}, {hi}]")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("duration range must be non-negative, got lower bound {0}")]
    NegativeDuration(i64),
    #[error("elementary height range must satisfy 0 <= lo <= hi, got [{lo}, {hi}]")]
    BadHeight { lo: i64, hi: i64 },
    #[error("capacity range [{lo}, {hi}] is empty")]
    BadCapacity { lo: i64, hi: i64 },
    #[error("interval may end at {end_max}, past the horizon {horizon}")]
    BeyondHorizon { end_max: i64, horizon: i64 },
    #[error("{0}")]
    Invalid(String),
}

pub type PropResult<T = ()> = Result<T, Inconsistency>;
