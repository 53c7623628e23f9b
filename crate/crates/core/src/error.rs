use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("position {pos} out of range 0..={len}")]
    OutOfRange { pos: usize, len: usize },
    #[error("empty pattern")]
    EmptyPattern,
    #[error("pattern longer than 8 symbols")]
    PatternTooLong,
    #[error("invalid pattern symbol {0:?}")]
    PatternSymbol(char),
    #[error("occurrence {j} requested but only {count} exist")]
    NoOccurrence { j: usize, count: usize },
    #[error("window of {len} bits at {start} does not fit in {total} bits")]
    BadWindow { start: usize, len: usize, total: usize },
    #[error("position {0} is not an open parenthesis")]
    NotOpen(usize),
    #[error("position {0} is not a close parenthesis")]
    NotClose(usize),
    #[error("parenthesis sequence is not balanced")]
    Unbalanced,
    #[error("empty range [{i}, {j}]")]
    EmptyRange { i: usize, j: usize },
    #[error("label {x} out of range for {nodes} nodes")]
    LabelOutOfRange { x: usize, nodes: usize },
    #[error("child index {i} exceeds degree {degree}")]
    ChildIndex { i: usize, degree: usize },
    #[error("target depth {d} exceeds node depth {depth}")]
    DepthTooLarge { d: usize, depth: usize },
    #[error("equal consecutive values at positions {0} and {next}", next = .0 + 1)]
    ConsecutiveEqual(usize),
    #[error("query {kind} is not supported by variant {variant}")]
    Unsupported { kind: String, variant: char },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("chunk size {0} is outside the supported 1..=12 bits")]
    ChunkTooLarge(u32),
    #[error("block index {i} out of range 1..={blocks}")]
    BlockIndex { i: usize, blocks: usize },
    #[error("operation needs variant {expected}, encoding is variant {actual}")]
    WrongVariant { expected: &'static str, actual: char },
    #[error("array of length {0} is too short")]
    TooShort(usize),
    #[error("malformed data: {0}")]
    Format(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}
