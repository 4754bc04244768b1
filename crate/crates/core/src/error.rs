use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("incompatible geometry: {0}")]
    Geometry(String),
    #[error("table of {entries} entries exceeds cap of {cap}")]
    TableCap { entries: u128, cap: u128 },
    #[error("enumeration of {work} window evaluations exceeds cap of {cap}; use the transducer engine")]
    EnumerationCap { work: u128, cap: u128 },
    #[error("memory guard exceeded: {0}")]
    MemoryGuard(String),
    #[error("alphabet is not product-structured")]
    NotProduct,
    #[error("word set is not {p}-freezing (counterexample {counterexample})")]
    NotFreezing { p: usize, counterexample: String },
    #[error("mixed word lengths in word set")]
    MixedLengths,
    #[error("empty border: {0}")]
    EmptyBorder(String),
    #[error("not one-sided: anchor {0}")]
    NotOnesided(i32),
    #[error("not nilpotent: {0}")]
    NotNilpotent(String),
    #[error("empty language")]
    EmptyLanguage,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}
