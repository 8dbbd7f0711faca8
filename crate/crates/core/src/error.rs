use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// All pairs have been inserted; the process cannot step further.
    #[error("process exhausted: all {0} pairs already inserted")]
    ProcessExhausted(usize),

    #[error("codegree diagnostics requested but codegrees are not materialized")]
    CodegreesNotMaterialized,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("infeasible regime: {0}")]
    InfeasibleRegime(String),

    #[error("degenerate rate: {0}")]
    DegenerateRate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A theorem-level identity failed to hold; always an implementation bug.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
