use thiserror::Error;

/// Errors shared across index construction and queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("text is empty")]
    EmptyText,
    #[error("text contains reserved byte 0x00 at offset {0}")]
    SentinelByte(usize),
    #[error("life segment [{start}, {end}] not within 1..={max}")]
    SegmentOutOfRange { start: usize, end: usize, max: usize },
    #[error("version {version} outside queryable range 1..={max}")]
    VersionOutOfRange { version: usize, max: usize },
    #[error("epsilon numerator must be 1..=16 and denominator 1..=4, got {num}/{den}")]
    InvalidEpsilon { num: u32, den: u32 },
    #[error("gap band requires alpha <= beta, got alpha={alpha}, beta={beta}")]
    InvalidGapRange { alpha: u64, beta: u64 },
    #[error("index was not built with the {0} query family")]
    ModeUnavailable(&'static str),
}
