//! Random binary string models and exact prefix probabilities.
//!
//! Strings are infinite and lazily materialized: sampling resolves the few
//! random parameters of the law (first-one index, mixture prefix length,
//! coin substream key) and individual bits are produced on demand. All
//! supported laws are diffuse, so finitely many sampled strings are distinct
//! with probability one; a per-string depth guard turns the astronomically
//! unlikely residual case into an error instead of an infinite scan.

mod alpha;
mod rng;
mod spec;
mod string;

pub use alpha::{AlphaSpec, TableContinuation, A_OF_SATURATION};
pub use rng::{mix_key, stream_rng};
pub use spec::{nu_spec, DistributionSpec, DEFAULT_A_CAP, MAX_ENUM_PREFIX_LEN};
pub use string::{
    first_divergence, parse_bits, sample_string, sample_string_with, LazyBitString, StringId,
    DEFAULT_MAX_DEPTH,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BitstreamError {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("invalid alpha sequence: {0}")]
    InvalidAlpha(String),
    #[error("prefix must be nonempty")]
    EmptyPrefix,
    #[error("prefix length {0} exceeds the enumeration limit {MAX_ENUM_PREFIX_LEN}")]
    PrefixTooLong(u32),
    #[error("bit indices are 1-based; index 0 is invalid")]
    ZeroIndex,
    #[error("geometric draw saw 64 failures; coin stream is suspect")]
    GeometricOverflow,
    #[error("scan guard exceeded after {scanned} coins (limit {limit})")]
    DepthGuard { scanned: u64, limit: u64 },
    #[error("fixed string has only {len} bits; bit {index} requested")]
    FixedOutOfRange { index: u64, len: u64 },
    #[error("fixed string contains no 1 bit")]
    NoFirstOne,
    #[error("strings {a} and {b} are indistinguishable within the depth guard")]
    Indistinguishable { a: StringId, b: StringId },
}
