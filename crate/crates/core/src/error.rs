use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("computation failed: {0}")]
    Computation(String),

    #[error("cannot normalize jammer: {0}")]
    CannotNormalize(String),

    #[error("missing context: {0}")]
    MissingContext(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("mitigation infeasible: {0}")]
    MitigationInfeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed codebook blob: {0}")]
    MalformedBlob(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
