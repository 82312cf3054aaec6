use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid decomposition: {0}")]
    Decomposition(String),
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("{what} has {n} vertices, over the enumeration cap of {cap}")]
    OverCap { what: &'static str, n: usize, cap: usize },
    #[error("bag of {len} vertices exceeds the packed state capacity of {max} for modulus {m}")]
    BagTooWide { len: usize, max: usize, m: u32 },
    #[error("prime search exceeded the configured cap")]
    PrimeSearch,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
