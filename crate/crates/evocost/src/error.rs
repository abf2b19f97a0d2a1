//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The block width must divide the agent size exactly; no partial
    /// final block is modeled.
    #[error("block width R={radius} does not divide agent size C={critical_size}")]
    Divisibility { critical_size: u64, radius: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Cost quantities carry a unit label and are never converted.
    #[error("unit mismatch: `{left}` vs `{right}`")]
    UnitMismatch { left: String, right: String },

    #[error("scale guard: {0}")]
    ScaleGuard(String),

    #[error("agent code length {length} is not a multiple of block width {radius}")]
    MisalignedCode { length: usize, radius: u64 },

    #[error("agent code length {length} exceeds landscape size {size}")]
    OversizedCode { length: usize, size: u64 },

    #[error("bit position {position} out of range for a {size}-bit landscape")]
    PositionOutOfRange { position: u64, size: u64 },

    /// Two results that must refer to the same configuration do not.
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
