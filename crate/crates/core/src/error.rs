use thiserror::Error;

/// Errors shared across the crate. Ordinary negative outcomes (infeasible
/// programs, separation witnesses, validator violations) are data, not
/// errors; this enum is for inputs the operations cannot accept.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input too large: {0}")]
    InputTooLarge(String),

    #[error("not a sequence code: {0}")]
    NotACode(u64),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("logic error: {0}")]
    LogicError(String),

    #[error("undefined distance to the empty polytope")]
    UndefinedDistance,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("address does not pin a rational point: {0}")]
    AddressNotExact(String),

    #[error("constants violation: {0}")]
    ConstantsViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
