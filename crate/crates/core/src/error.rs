use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series term {index} is negative")]
    NonPositiveTerm { index: usize },

    #[error("series did not reach the truncation cutoff within {terms} terms")]
    NoConvergence { terms: usize },

    #[error("multi-index enumeration would produce {count} entries (limit {limit})")]
    SizeLimit { count: u128, limit: u128 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("quadrature order {order} is below the required {required}")]
    QuadratureUnderresolved { order: usize, required: usize },

    #[error("N = {n} is outside the domain (N >= 3 required)")]
    DomainError { n: u64 },

    #[error("truncation degree {degree} still moves the norm's log by {delta:e}")]
    TruncationInsufficient { degree: usize, delta: f64 },

    #[error("empty grid")]
    EmptyGrid,

    #[error("only {found} nonzero degrees; at least {needed} are needed for a fit")]
    InsufficientData { found: usize, needed: usize },

    #[error("m' has no sign change on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("integrand has no interior maximum")]
    WindowNotFound,

    #[error("growth fit needs at least 6 radii spanning a factor of 100: {0}")]
    InsufficientRadii(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
