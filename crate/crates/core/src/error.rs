use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("truncated PGM data: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("unsupported PGM maxval {0} (must be in 1..=65535)")]
    UnsupportedMaxval(u64),
    #[error("I/O failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("malformed band manifest line {line}: {reason}")]
    MalformedManifest { line: usize, reason: String },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("duplicate band label {0:?}")]
    DuplicateLabel(String),
    #[error("invalid image dimensions {width}x{height} for {len} pixels")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("kernel {kernel:?} larger than image {image:?}")]
    KernelLargerThanImage {
        kernel: (usize, usize),
        image: (usize, usize),
    },
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("scene geometry out of bounds: {0}")]
    GeometryOutOfBounds(String),
    #[error("image {image:?} smaller than operator mask {mask:?}")]
    ImageTooSmall {
        image: (usize, usize),
        mask: (usize, usize),
    },
    #[error("threshold {0} outside [0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("invalid threshold pair: low {low} must be < high {high}, both in [0, 1]")]
    InvalidThresholdPair { low: f64, high: f64 },
    #[error("zero-crossing slope threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),
    #[error("threshold grid is empty")]
    EmptyGrid,
    #[error("threshold grid must be strictly ascending within [0, 1]")]
    UnsortedGrid,
    #[error("sweep densities are not filled")]
    UnfilledDensities,
    #[error("degenerate input: all samples equal")]
    DegenerateInput,
    #[error("band stack is empty")]
    EmptyStack,
    #[error("noise density {0} outside [0, 1]")]
    DensityOutOfRange(f64),
    #[error("timing needs at least 3 repeats, got {0}")]
    TooFewRepeats(usize),
    #[error("side lengths must be non-empty and strictly ascending")]
    UnsortedSides,
}

impl Error {
    /// Variant name, used by the CLI on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedHeader(_) => "MalformedHeader",
            Error::TruncatedData { .. } => "TruncatedData",
            Error::UnsupportedMaxval(_) => "UnsupportedMaxval",
            Error::IoFailure { .. } => "IoFailure",
            Error::MissingFile(_) => "MissingFile",
            Error::MalformedManifest { .. } => "MalformedManifest",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::InvalidDimensions { .. } => "InvalidDimensions",
            Error::KernelLargerThanImage { .. } => "KernelLargerThanImage",
            Error::NonPositiveSigma(_) => "NonPositiveSigma",
            Error::GeometryOutOfBounds(_) => "GeometryOutOfBounds",
            Error::ImageTooSmall { .. } => "ImageTooSmall",
            Error::ThresholdOutOfRange(_) => "ThresholdOutOfRange",
            Error::InvalidThresholdPair { .. } => "InvalidThresholdPair",
            Error::NegativeThreshold(_) => "NegativeThreshold",
            Error::EmptyGrid => "EmptyGrid",
            Error::UnsortedGrid => "UnsortedGrid",
            Error::UnfilledDensities => "UnfilledDensities",
            Error::DegenerateInput => "DegenerateInput",
            Error::EmptyStack => "EmptyStack",
            Error::DensityOutOfRange(_) => "DensityOutOfRange",
            Error::TooFewRepeats(_) => "TooFewRepeats",
            Error::UnsortedSides => "UnsortedSides",
        }
    }

    /// True for errors caused by invalid parameters rather than data or I/O.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveSigma(_)
                | Error::GeometryOutOfBounds(_)
                | Error::ThresholdOutOfRange(_)
                | Error::InvalidThresholdPair { .. }
                | Error::NegativeThreshold(_)
                | Error::EmptyGrid
                | Error::UnsortedGrid
                | Error::DensityOutOfRange(_)
                | Error::TooFewRepeats(_)
                | Error::UnsortedSides
        )
    }
}
