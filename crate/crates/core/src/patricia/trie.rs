//! Explicit node-per-prefix tries and their compression.

use crate::bitstreams::{LazyBitString, StringId};

use super::tree::{PatNode, PatriciaTree};
use super::PatriciaError;

/// Hard cap for the explicit representation; larger inputs should be built
/// incrementally with [`PatriciaTree::insert`].
const MAX_TRIE_STRINGS: usize = 1 << 12;

/// Node budget for the explicit representation. Inputs whose shared
/// prefixes would materialize more nodes than this (including truly
/// indistinguishable strings) are rejected.
const MAX_TRIE_NODES: usize = 1 << 21;

#[derive(Clone, Debug)]
pub(crate) struct TrieNode {
    pub prefix_depth: u64,
    pub children: [Option<u32>; 2],
    pub leaf_string_id: Option<StringId>,
}

/// A trie over distinct strings: every input string occupies the node of its
/// shortest prefix that is a prefix of no other input string.
#[derive(Clone, Debug)]
pub struct Trie {
    pub(crate) nodes: Vec<TrieNode>,
    pub(crate) root: u32,
}

impl Trie {
    /// Maximal edge distance from the root to any node (the deepest node of
    /// a trie is always a leaf).
    pub fn height(&self) -> u64 {
        self.nodes.iter().map(|n| n.prefix_depth).max().unwrap_or(0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.leaf_string_id.is_some())
            .count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Builds the trie over all strings in the store.
///
/// The leaf for string `i` sits at depth `1 + max_j lcp(i, j)`; a singleton
/// input yields the one-leaf trie of height 0.
pub fn build_trie(strings: &mut [LazyBitString]) -> Result<Trie, PatriciaError> {
    if strings.is_empty() {
        return Err(PatriciaError::EmptyInput);
    }
    if strings.len() > MAX_TRIE_STRINGS {
        return Err(PatriciaError::TooManyStrings {
            n: strings.len(),
            max: MAX_TRIE_STRINGS,
        });
    }
    let mut nodes: Vec<TrieNode> = Vec::new();
    // Work list of unexpanded nodes: (node index, member ids, depth).
    let mut work: Vec<(u32, Vec<u32>, u64)> = Vec::new();
    nodes.push(TrieNode {
        prefix_depth: 0,
        children: [None, None],
        leaf_string_id: None,
    });
    work.push((0, (0..strings.len() as u32).collect(), 0));
    while let Some((idx, ids, depth)) = work.pop() {
        if ids.len() == 1 {
            nodes[idx as usize].leaf_string_id = Some(ids[0]);
            continue;
        }
        let mut parts: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
        for &id in &ids {
            let bit = strings[id as usize].bit_at(depth + 1).map_err(|e| {
                // Running off a fixture's bits before a set splits means two
                // inputs cannot be separated.
                match e {
                    crate::bitstreams::BitstreamError::FixedOutOfRange { .. } => {
                        crate::bitstreams::BitstreamError::Indistinguishable {
                            a: ids[0],
                            b: ids[1],
                        }
                        .into()
                    }
                    other => PatriciaError::Bitstream(other),
                }
            })?;
            parts[bit as usize].push(id);
        }
        for (dir, part) in parts.into_iter().enumerate() {
            if part.is_empty() {
                continue;
            }
            if nodes.len() >= MAX_TRIE_NODES {
                // Either a truly indistinguishable pair or a shared prefix
                // too long for the explicit representation.
                return Err(crate::bitstreams::BitstreamError::Indistinguishable {
                    a: ids[0],
                    b: ids[1],
                }
                .into());
            }
            let child = nodes.len() as u32;
            nodes.push(TrieNode {
                prefix_depth: depth + 1,
                children: [None, None],
                leaf_string_id: None,
            });
            nodes[idx as usize].children[dir] = Some(child);
            work.push((child, part, depth + 1));
        }
    }
    Ok(Trie { nodes, root: 0 })
}

/// Removes every out-degree-1 node from the trie and closes the gaps.
///
/// Branching trie nodes become the internal nodes of the PATRICIA tree: a
/// branching node at trie depth `d` separates its children by bit `d + 1`,
/// so it carries split index `d + 1`. Leaves are preserved, keeping their
/// trie depth as the witness prefix length.
pub fn compress(trie: &Trie) -> PatriciaTree {
    let mut nodes: Vec<PatNode> = Vec::new();
    let mut leaf_count = 0u32;
    let root = compress_node(trie, trie.root, &mut nodes, &mut leaf_count);
    PatriciaTree::from_parts(nodes, Some(root), leaf_count)
}

fn compress_node(trie: &Trie, mut idx: u32, out: &mut Vec<PatNode>, leaves: &mut u32) -> u32 {
    // Skip unary chains iteratively; recursion depth is then bounded by the
    // branching structure, not by prefix length.
    loop {
        let node = &trie.nodes[idx as usize];
        match (node.children[0], node.children[1]) {
            (None, None) => {
                let id = node
                    .leaf_string_id
                    .expect("childless trie node must be a leaf");
                out.push(PatNode::Leaf {
                    string_id: id,
                    witness_prefix_length: node.prefix_depth,
                });
                *leaves += 1;
                return (out.len() - 1) as u32;
            }
            (Some(only), None) | (None, Some(only)) => idx = only,
            (Some(zero), Some(one)) => {
                let split_index = node.prefix_depth + 1;
                let c0 = compress_node(trie, zero, out, leaves);
                let c1 = compress_node(trie, one, out, leaves);
                out.push(PatNode::Internal {
                    split_index,
                    children: [c0, c1],
                });
                return (out.len() - 1) as u32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstreams::parse_bits;

    pub(crate) fn fixed_set(rows: &[&str]) -> Vec<LazyBitString> {
        rows.iter()
            .enumerate()
            .map(|(i, row)| LazyBitString::fixed(i as u32, parse_bits(row).unwrap()))
            .collect()
    }

    #[test]
    fn single_string_is_a_root_leaf() {
        let mut strings = fixed_set(&["1"]);
        let trie = build_trie(&mut strings).unwrap();
        assert_eq!(trie.height(), 0);
        assert_eq!(trie.leaf_count(), 1);
        assert_eq!(trie.node_count(), 1);
    }

    #[test]
    fn two_strings_split_at_the_first_bit() {
        let mut strings = fixed_set(&["0", "1"]);
        let trie = build_trie(&mut strings).unwrap();
        assert_eq!(trie.height(), 1);
        assert_eq!(trie.leaf_count(), 2);
        let tree = compress(&trie);
        assert_eq!(tree.height(), 1);
        assert_eq!(tree.leaf_count(), 2);
    }

    #[test]
    fn six_string_fixture_shapes() {
        let mut strings = fixed_set(&["00000", "00001", "0100", "0101", "1100", "1101"]);
        let trie = build_trie(&mut strings).unwrap();
        assert_eq!(trie.height(), 5);
        assert_eq!(trie.leaf_count(), 6);
        let tree = compress(&trie);
        assert_eq!(tree.height(), 3);
        assert_eq!(tree.leaf_count(), 6);
        assert_eq!(tree.internal_count(), 5);
    }

    #[test]
    fn already_compressed_trie_is_unchanged() {
        let mut strings = fixed_set(&["0", "1"]);
        let trie = build_trie(&mut strings).unwrap();
        let tree = compress(&trie);
        assert_eq!(tree.height(), trie.height());
        assert_eq!(tree.internal_count(), 1);
    }

    #[test]
    fn leaf_depth_is_one_plus_max_lcp() {
        let mut strings = fixed_set(&["0011", "0010", "0111"]);
        let trie = build_trie(&mut strings).unwrap();
        // lcp(0,1) = 3, lcp(0,2) = 1, lcp(1,2) = 1.
        assert_eq!(trie.height(), 4);
        let depths: Vec<u64> = trie
            .nodes
            .iter()
            .filter(|n| n.leaf_string_id.is_some())
            .map(|n| n.prefix_depth)
            .collect();
        let mut sorted = depths.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![2, 4, 4]);
    }

    #[test]
    fn duplicate_strings_are_rejected() {
        let mut strings = fixed_set(&["0101", "0101"]);
        assert!(matches!(
            build_trie(&mut strings),
            Err(PatriciaError::Bitstream(
                crate::bitstreams::BitstreamError::Indistinguishable { .. }
            ))
        ));
    }

    #[test]
    fn compression_never_increases_height() {
        let sets: &[&[&str]] = &[
            &["00000", "00001", "0100", "0101", "1100", "1101"],
            &["000001", "1"],
            &["01", "001", "0001", "1"],
        ];
        for rows in sets {
            let mut strings = fixed_set(rows);
            let trie = build_trie(&mut strings).unwrap();
            assert!(compress(&trie).height() <= trie.height());
        }
    }
}
