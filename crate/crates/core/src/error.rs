use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulation modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("target time {t_end} precedes state time {t_start}")]
    TimeOrder { t_start: f64, t_end: f64 },

    #[error("operation requires a drive with rwa = {expected}")]
    RwaMismatch { expected: bool },

    #[error("truncation order must be non-negative, got {0}")]
    InvalidTruncation(i64),

    #[error("measurement drive violates g0 = omega/(2m): g0 = {g0}, expected {expected}")]
    ReversalConstraint { g0: f64, expected: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no pairs survived post-selection (M = 0)")]
    EmptyPostSelection,

    #[error("phase indeterminate: both quadratures are within one standard error of zero")]
    PhaseIndeterminate,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("post-selected subgroup has {0} atoms, below the two-atom minimum")]
    SubgroupTooSmall(usize),

    #[error("state has zero norm in the requested branch")]
    ZeroNorm,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
