use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid modulus {0}: must be positive")]
    InvalidModulus(u64),

    #[error("unsupported modulus {n}: must be at least {min}")]
    UnsupportedModulus { n: u64, min: u64 },

    #[error("{a} is not a unit modulo {n}")]
    NonUnit { a: u64, n: u64 },

    #[error("element {value} at position {pos} is outside [1, {max}]")]
    InvalidElement { pos: usize, value: i64, max: u64 },

    #[error("sequence must be nonempty")]
    EmptySequence,

    #[error("sequence {0:?} is not zero-sum")]
    NotZeroSum(Vec<u64>),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("n = {0} is degenerate for the explicit forms (needs n >= 11)")]
    Degenerate(u64),

    #[error("internal fault: {0}")]
    Fault(String),

    #[error("checkpoint {path}: {source}")]
    Checkpoint {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
