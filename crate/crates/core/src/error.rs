use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus is zero")]
    ModulusZero,
    #[error("gcd(0, 0) is undefined")]
    UndefinedGcd,
    #[error("the argument of 0 is undefined")]
    ZeroArgument,
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("{what} = {value} is outside the table range (limit {limit})")]
    OutOfRange { what: &'static str, value: u64, limit: u64 },
    #[error("capacity exceeded: {required_bytes} bytes required, budget is {budget_bytes} bytes ({hint})")]
    Capacity {
        required_bytes: u64,
        budget_bytes: u64,
        hint: String,
    },
    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("grid of resolution {requested} cannot resolve the cutoff; need m >= {required}")]
    Resolution { requested: usize, required: usize },
    #[error("{a}/{q} is not a reduced residue")]
    NonReduced { a: String, q: String },
    #[error("empty sector")]
    EmptySector,
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cache format: {0}")]
    CacheFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
