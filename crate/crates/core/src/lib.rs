//! Construction and analysis of PATRICIA trees built from random infinite
//! binary strings.
//!
//! The crate has four parts:
//!
//! * [`bitstreams`] — string distributions (Bernoulli, the `mu_n` family with
//!   a uniform first-one index, and geometric mixtures over it), lazy sampled
//!   strings, and exact prefix probabilities.
//! * [`patricia`] — tries and PATRICIA trees over finite sets of distinct
//!   strings, with structural statistics and an invariant checker.
//! * [`bounds`] — closed-form tail and height bounds for comparison against
//!   simulation output.
//! * [`experiments`] — a seeded, reproducible Monte Carlo driver that sweeps
//!   a grid of tree sizes and aggregates height statistics.

pub mod bitstreams;
pub mod bounds;
pub mod experiments;
pub mod patricia;

pub use bitstreams::{
    nu_spec, parse_bits, sample_string, sample_string_with, AlphaSpec, BitstreamError,
    DistributionSpec, LazyBitString, StringId, TableContinuation, DEFAULT_A_CAP,
    DEFAULT_MAX_DEPTH,
};
pub use bounds::BoundsError;
pub use experiments::{ExperimentConfig, ExperimentError, Summary, SummaryRow, TrialRecord};
pub use patricia::{build_trie, compress, PatriciaError, PatriciaTree, Trie, Violation};
