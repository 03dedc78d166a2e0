use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size mismatch: {left} points vs {right} points")]
    SizeMismatch { left: usize, right: usize },

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Weingarten system is singular at n = {n}, N = {dim}")]
    Singular { n: usize, dim: u64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("refusing to enumerate {tuples} tuples (guard is {guard})")]
    GuardExceeded { tuples: u128, guard: u128 },

    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
