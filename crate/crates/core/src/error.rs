use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ECA number {0} is outside 0..=255")]
    EcaOutOfRange(u32),
    #[error("hex code has {found} digits, radius {radius} needs {expected}")]
    HexLength {
        radius: u32,
        expected: usize,
        found: usize,
    },
    #[error("invalid hex digit {0:?}")]
    HexDigit(char),
    #[error("operation needs a binary alphabet, rule has {0} symbols")]
    NonBinary(usize),
    #[error("word of length {len} is shorter than the neighborhood width {width}")]
    WordTooShort { len: usize, width: usize },
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("invalid tail choice: {0}")]
    InvalidTails(String),
}

pub type Result<T> = std::result::Result<T, Error>;
