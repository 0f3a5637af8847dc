use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// [`Error::name`] gives a stable identifier for each variant so that callers
/// on the far side of a process or language boundary can match on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal length {0} is odd; the dyadic split needs an even length")]
    OddLength(usize),
    #[error("signal of length {0} is too short to decompose (need at least 2)")]
    DegenerateSignal(usize),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("coefficient overflow: {0} does not fit the 32-bit coefficient range")]
    Overflow(i64),
    #[error("length mismatch: low band has {low} samples, high band has {high}")]
    LengthMismatch { low: usize, high: usize },
    #[error("plane is {width}x{height}; both dimensions must be even and at least 2")]
    OddDimension { width: usize, height: usize },
    #[error("subband planes disagree in size: {0}")]
    DimensionMismatch(String),
    #[error("{width}x{height} is not divisible by 2^{depth}")]
    DepthTooLarge { width: usize, height: usize, depth: usize },
    #[error("source plane is {width}x{height}; resizing needs at least 2x2")]
    DegenerateDimension { width: usize, height: usize },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt container: {0}")]
    CorruptContainer(String),
    #[error("container version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u8, expected: u8 },
    #[error("empty channel mask")]
    EmptyMask,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable error name, independent of the display message.
    pub fn name(&self) -> &'static str {
        match self {
            Error::OddLength(_) => "OddLengthError",
            Error::DegenerateSignal(_) => "DegenerateSignal",
            Error::NonFiniteSample { .. } => "NonFiniteSample",
            Error::Overflow(_) => "OverflowError",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::OddDimension { .. } => "OddDimensionError",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DepthTooLarge { .. } => "DepthTooLarge",
            Error::DegenerateDimension { .. } => "DegenerateDimension",
            Error::Decode(_) => "DecodeError",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::CorruptContainer(_) => "CorruptContainer",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::EmptyMask => "EmptyMask",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }
}
