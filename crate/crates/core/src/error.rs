use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant carries enough context to name the offending quantity; the
/// command-line front end maps them onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid conductor {0}: must be positive")]
    InvalidConductor(u64),

    #[error("conductor {from} does not divide {to}")]
    NotASubfield { from: u64, to: u64 },

    /// Series division by a series whose constant term vanishes. The string
    /// names the factor that failed.
    #[error("series has zero constant term and is not invertible: {0}")]
    NonUnitConstantTerm(String),

    #[error("coefficient {index} requested from a series truncated at order {order}")]
    OrderExceeded { index: usize, order: usize },

    #[error("invalid character label {label:?} for modulus {modulus}")]
    InvalidCharacterLabel { modulus: u64, label: Vec<u64> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported expression: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("not a unit in the residue ring: {0}")]
    NotAUnit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
