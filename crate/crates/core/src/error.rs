use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter for {what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },

    #[error("malformed canonical code at position {position}: {reason}")]
    MalformedCode { position: usize, reason: &'static str },

    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: &'static str },

    #[error("a single leaf has no root-split")]
    LeafRootSplit,

    #[error("invalid leaf set: {0}")]
    InvalidLeafSet(String),

    /// The requested computation exceeds the configured work ceiling.
    #[error("{what} needs about {estimate} units of work, above the ceiling of {limit}")]
    Infeasible {
        what: String,
        estimate: u128,
        limit: u128,
    },

    #[error("inconsistent multideck: {0}")]
    InconsistentMultideck(String),

    #[error("no counterexample family for n = {n}: {reason}")]
    UnsupportedSize { n: usize, reason: String },

    #[error("search certificate for k = {k} is not exhaustive")]
    NotExhaustive { k: usize },

    #[error("cache file {path}, line {line}: {reason}")]
    CacheFormat {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
