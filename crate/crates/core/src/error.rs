use thiserror::Error;

/// Errors returned by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A polygonal chain needs at least two endpoints.
    #[error("series must contain at least 2 samples, got {0}")]
    SeriesTooShort(usize),
    /// Every sample must be a finite real number.
    #[error("non-finite sample {value} at index {index}")]
    NonFiniteSample { index: usize, value: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("length scaling must be non-negative, got {0}")]
    NegativeScale(f64),
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("empty token at line {line}")]
    EmptyToken { line: usize },
    #[error("duplicate token {token:?} at lines {first_line} and {dup_line}")]
    DuplicateToken {
        token: String,
        first_line: usize,
        dup_line: usize,
    },
    /// Digitization produced more clusters than the alphabet can name.
    #[error("alphabet has {available} symbols but digitization produced {required} clusters")]
    AlphabetExhausted { required: usize, available: usize },
    #[error("requested {k} clusters but only {distinct} distinct tuples exist")]
    TooManyClusters { k: usize, distinct: usize },
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    /// The channel by which a predictor's hallucinated token is caught.
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { symbol: String, position: usize },
    #[error("piece length must be positive, got {value} at index {index}")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("position {position} out of range for sequence of length {len}")]
    InvalidPosition { position: usize, len: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("fit input mixes apca and fapca compression results")]
    MixedVariants,
    #[error("horizon must be at least 1")]
    InvalidHorizon,
    #[error("predictor order must be at least 1")]
    InvalidOrder,
    #[error("smoothing constant must be non-negative, got {0}")]
    InvalidSmoothing(f64),
    #[error("predictor has no training counts")]
    EmptyModel,
    #[error("model JSON: {0}")]
    ModelJson(String),
}

pub type Result<T> = std::result::Result<T, Error>;
