use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("bad exponent in token `{0}`")]
    BadExponent(String),
    #[error("bad generator name `{0}`")]
    BadName(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("move {index} not applicable: {reason}")]
    NotApplicable { index: usize, reason: String },
    #[error("sequence ends in a word of length {final_length}, not the empty word")]
    NotNull { final_length: usize },
    #[error("final word of the first sequence differs from the initial word of the second")]
    EndpointMismatch,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("no relator moves the central word past the letter: {0}")]
    NoTransportRelator(String),
    #[error("word is not null-homotopic")]
    NotNullHomotopic,
    #[error("basis has index {t} > 1 in the last term of the lower central series")]
    UnsupportedIndex { t: u64 },
    #[error("series has nonzero terms below degree {class}")]
    NotInGammaC { class: u32 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = core::result::Result<T, Error>;
