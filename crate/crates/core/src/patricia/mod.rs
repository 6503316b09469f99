//! Tries and PATRICIA trees over finite sets of distinct binary strings.
//!
//! The explicit trie keeps one node per prefix and is intended for small
//! inputs and for serving as the batch oracle. The PATRICIA tree stores the
//! bit index tested at each internal node instead of edge labels, so long
//! all-zero runs in the input strings never have to be materialized. Large
//! runs are built incrementally with [`PatriciaTree::insert`], which is
//! structurally equivalent to compressing the batch trie.

mod tree;
mod trie;

pub use tree::{PatriciaTree, Violation};
pub use trie::{build_trie, compress, Trie};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bitstreams::{BitstreamError, LazyBitString, StringId};

#[derive(Debug, Error)]
pub enum PatriciaError {
    #[error("input must contain at least one string")]
    EmptyInput,
    #[error("explicit trie construction supports at most {max} strings, got {n}")]
    TooManyStrings { n: usize, max: usize },
    #[error("string id {id} is out of range for a store of {len} strings")]
    IdOutOfRange { id: StringId, len: usize },
    #[error("string id {id} is already stored in the tree")]
    DuplicateId { id: StringId },
    #[error(transparent)]
    Bitstream(#[from] BitstreamError),
}

/// Number of distinct first-one indices among the strings.
///
/// Any PATRICIA tree over the same strings deterministically has height at
/// least this count minus one: the first-one indices are pairwise
/// distinguishing positions along a single all-zeros spine.
pub fn distinct_first_one_count(strings: &mut [LazyBitString]) -> Result<u64, PatriciaError> {
    if strings.is_empty() {
        return Err(PatriciaError::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    for s in strings.iter_mut() {
        seen.insert(s.first_one_index()?);
    }
    Ok(seen.len() as u64)
}
