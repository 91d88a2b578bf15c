use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("coordinate arrays differ in length ({xs} vs {ys})")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A slot inside a cleanup window held a real point that belongs to neither subset.
    #[error("corrupted parallel step: point at index {index} is in neither subset")]
    CorruptParallelStep { index: usize },

    #[error("load error: {0}")]
    Load(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
