use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("length {0} is not a power of two (>= 2)")]
    NotPowerOfTwo(usize),

    #[error("sequence element {value} at index {index} is not +1 or -1")]
    InvalidElement { index: usize, value: i64 },

    #[error("not a bijection on 0..{0}")]
    InvalidPermutation(usize),

    #[error("block of size {block} does not fit sequence length {len}")]
    BlockTooLarge { block: usize, len: usize },

    #[error("not representable at length {len}: {what}")]
    NotRepresentable { len: usize, what: String },

    #[error("value {value} outside domain {domain}")]
    OutOfDomain { value: String, domain: &'static str },

    #[error("cos = {cos} and sin = {sin} are both claimed dyadic inside (0, 1); at most one can be")]
    Contradiction { cos: String, sin: String },

    #[error("cos = {cos} and sin = {sin} do not satisfy cos^2 + sin^2 = 1")]
    Inconsistent { cos: String, sin: String },

    #[error("integration diverged at step {step}")]
    Diverged { step: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
