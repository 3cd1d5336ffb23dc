use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("shape asset failed verification: {0}")]
    AssetInvalid(String),
    #[error("shape is not rectifiable at linear scale {scale}")]
    NotRectifiable { scale: u32 },
    #[error("production rule does not match tile: {0}")]
    RuleMismatch(String),
    #[error("structural index {class} produces different children in different contexts")]
    NonDeterministicProduction { class: u32 },
    #[error("structural index {0} has no entry in the rank table")]
    UnknownClass(u32),
    #[error("pixel ({x}, {y}) is outside the {width}x{height} view")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: u32,
        height: u32,
    },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("frequency band is empty: {0}")]
    EmptyBand(String),
    #[error("rank assignment failed at level {level}: {reason}")]
    RankingStuck { level: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("image format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
