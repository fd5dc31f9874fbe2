use thiserror::Error;

/// Errors reported by the library.
///
/// Shape mismatches between values the caller constructed (e.g. multiplying
/// incompatible matrices) panic instead; the variants here cover conditions
/// that depend on the *data*, not on programmer error.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("map is not {side}-invertible")]
    NotInvertible { side: &'static str },

    #[error("enumeration of {needed} objects exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("double description limit exceeded: {0}")]
    DdLimitExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),
}
