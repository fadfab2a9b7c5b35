use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants mirror the failure classes callers have to tell apart: the
/// command line maps them onto distinct exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate arc: endpoints coincide")]
    DegenerateArc,

    #[error("bracket error: no sign change on [{lo}, {hi}]")]
    Bracket { lo: String, hi: String },

    #[error("point {0} is the image of the flat piece; its preimage is not a single point")]
    AmbiguousPreimage(String),

    #[error("arc contains the critical value {0} in its interior; its preimage splits")]
    SplitPreimage(String),

    #[error("depth error: {0}")]
    Depth(String),

    #[error("tuning failed at level {level}: {reason} (last bracket [{lo}, {hi}])")]
    Tuning {
        level: usize,
        reason: String,
        lo: String,
        hi: String,
    },

    #[error("combinatorics error: closest returns {found:?} differ from target {expected:?}")]
    Combinatorics { expected: Vec<u64>, found: Vec<u64> },

    #[error("partition error at level {level}: {reason}")]
    Partition { level: usize, reason: String },

    #[error("precision error at index {index}: {reason}")]
    Precision { index: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
