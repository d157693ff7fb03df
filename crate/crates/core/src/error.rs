use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("QPSK requires even bit count (got {0} bits)")]
    OddBitCount(usize),

    #[error("cannot scale noise to an all-zero signal (channel {channel})")]
    ZeroPowerChannel { channel: usize },

    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("degenerate denominator for row {row}")]
    DegenerateDenominator { row: usize },

    #[error("signals too smooth or L degenerate: averaged-difference covariance is singular")]
    SingularAveragedCovariance,

    #[error("undefined correlation for constant signal")]
    ConstantSignal,

    #[error("no samples")]
    NoSamples,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in sweep status columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::OddBitCount(_) => "odd_bit_count",
            Error::ZeroPowerChannel { .. } => "zero_power_channel",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::SingularAveragedCovariance => "singular_cbar",
            Error::ConstantSignal => "constant_signal",
            Error::NoSamples => "no_samples",
            Error::Parse { .. } => "parse",
            Error::Stage { source, .. } => source.code(),
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Config(_) => "config",
        }
    }

    /// True for failures caused by the caller's input rather than the data.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Stage { source, .. } => source.is_usage(),
            Error::Config(_) | Error::InvalidInput(_) | Error::OddBitCount(_) => true,
            _ => false,
        }
    }
}
