//! Arena-backed PATRICIA trees with incremental insertion.

use serde_json::json;
use thiserror::Error;

use crate::bitstreams::{first_divergence, LazyBitString, StringId};

use super::PatriciaError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum PatNode {
    Internal {
        /// 1-based bit position tested at this node.
        split_index: u64,
        children: [u32; 2],
    },
    Leaf {
        string_id: StringId,
        /// Length of the shortest prefix distinguishing this string from
        /// every other stored string; equals the parent's split index.
        witness_prefix_length: u64,
    },
}

/// Binary PATRICIA tree: every internal node has exactly two children and
/// split indices strictly increase along every root-to-leaf path.
#[derive(Clone, Debug, Default)]
pub struct PatriciaTree {
    nodes: Vec<PatNode>,
    root: Option<u32>,
    leaf_count: u32,
}

/// A broken structural invariant, as data. [`PatriciaTree::validate`]
/// reports every violation it finds instead of stopping at the first.
#[derive(Debug, Error, PartialEq)]
pub enum Violation {
    #[error("node {node} child {child} is out of arena bounds")]
    DanglingChild { node: u32, child: u32 },
    #[error("node {node} is reachable along two paths")]
    NodeRevisited { node: u32 },
    #[error("node {node} has effective out-degree 1")]
    OutDegreeOne { node: u32 },
    #[error("node {node} split {split} does not exceed its parent's split {parent_split}")]
    NonIncreasingSplit {
        node: u32,
        parent_split: u64,
        split: u64,
    },
    #[error("leaf {leaf}: string bit at split {split_index} disagrees with the branch taken")]
    LeafBitMismatch { leaf: u32, split_index: u64 },
    #[error("leaf {leaf}: string bit at split {split_index} is unavailable")]
    LeafBitUnavailable { leaf: u32, split_index: u64 },
    #[error("leaf {leaf} references string {string_id} outside the store")]
    StringIdOutOfRange { leaf: u32, string_id: StringId },
    #[error("leaf {leaf} witness length {witness} differs from parent split {parent_split}")]
    WitnessMismatch {
        leaf: u32,
        witness: u64,
        parent_split: u64,
    },
    #[error("{internal} internal nodes for {leaves} leaves")]
    NodeCountMismatch { internal: u64, leaves: u64 },
    #[error("recorded leaf count {recorded} but found {actual}")]
    LeafCountMismatch { recorded: u32, actual: u32 },
    #[error("{count} arena nodes are unreachable from the root")]
    UnreachableNodes { count: usize },
    #[error("height {height} exceeds the leaf bound {bound}")]
    HeightAboveLeafBound { height: u64, bound: u64 },
}

impl PatriciaTree {
    pub fn new() -> Self {
        PatriciaTree::default()
    }

    pub(crate) fn from_parts(nodes: Vec<PatNode>, root: Option<u32>, leaf_count: u32) -> Self {
        PatriciaTree {
            nodes,
            root,
            leaf_count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn leaf_count(&self) -> u32 {
        self.leaf_count
    }

    pub fn internal_count(&self) -> u32 {
        self.nodes.len() as u32 - self.leaf_count
    }

    /// Edge distance from the root to the deepest leaf; 0 for a single leaf
    /// and for the empty tree.
    pub fn height(&self) -> u64 {
        let Some(root) = self.root else { return 0 };
        let mut best = 0;
        let mut stack = vec![(root, 0u64)];
        while let Some((idx, depth)) = stack.pop() {
            match &self.nodes[idx as usize] {
                PatNode::Internal { children, .. } => {
                    stack.push((children[0], depth + 1));
                    stack.push((children[1], depth + 1));
                }
                PatNode::Leaf { .. } => best = best.max(depth),
            }
        }
        best
    }

    /// Largest split index tested anywhere in the tree; 0 if none.
    pub fn max_split_index(&self) -> u64 {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                PatNode::Internal { split_index, .. } => Some(*split_index),
                PatNode::Leaf { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Inserts string `id` from the store, splicing a single binary node so
    /// that the result is structurally identical to rebuilding from scratch.
    pub fn insert(&mut self, strings: &mut [LazyBitString], id: StringId) -> Result<(), PatriciaError> {
        if id as usize >= strings.len() {
            return Err(PatriciaError::IdOutOfRange {
                id,
                len: strings.len(),
            });
        }
        let Some(root) = self.root else {
            self.nodes.push(PatNode::Leaf {
                string_id: id,
                witness_prefix_length: 0,
            });
            self.root = Some(0);
            self.leaf_count = 1;
            return Ok(());
        };
        // Walk by testing split indices until a leaf gives us a witness.
        let mut path: Vec<(u32, usize)> = Vec::new();
        let mut cur = root;
        let witness_id = loop {
            match self.nodes[cur as usize] {
                PatNode::Internal {
                    split_index,
                    children,
                } => {
                    let dir = strings[id as usize].bit_at(split_index)? as usize;
                    path.push((cur, dir));
                    cur = children[dir];
                }
                PatNode::Leaf { string_id, .. } => break string_id,
            }
        };
        if witness_id == id {
            return Err(PatriciaError::DuplicateId { id });
        }
        let divergence = {
            let (s, w) = pair_mut(strings, id as usize, witness_id as usize);
            first_divergence(s, w)?
        };
        let new_dir = strings[id as usize].bit_at(divergence)? as usize;

        let new_leaf = self.nodes.len() as u32;
        self.nodes.push(PatNode::Leaf {
            string_id: id,
            witness_prefix_length: divergence,
        });
        // Splice above the first node whose split exceeds the divergence
        // bit; all strings below that node agree with the witness there.
        let splice = path
            .iter()
            .position(|&(n, _)| self.split_of(n) > divergence);
        let displaced = match splice {
            Some(p) => path[p].0,
            None => {
                // Splicing directly above the witness leaf: it is now
                // distinguished at the divergence bit.
                if let PatNode::Leaf {
                    witness_prefix_length,
                    ..
                } = &mut self.nodes[cur as usize]
                {
                    *witness_prefix_length = divergence;
                }
                cur
            }
        };
        let mut children = [displaced; 2];
        children[new_dir] = new_leaf;
        let new_internal = self.nodes.len() as u32;
        self.nodes.push(PatNode::Internal {
            split_index: divergence,
            children,
        });
        let parent = match splice {
            Some(0) => None,
            Some(p) => Some(path[p - 1]),
            None => path.last().copied(),
        };
        match parent {
            None => self.root = Some(new_internal),
            Some((p, dir)) => {
                if let PatNode::Internal { children, .. } = &mut self.nodes[p as usize] {
                    children[dir] = new_internal;
                }
            }
        }
        self.leaf_count += 1;
        Ok(())
    }

    fn split_of(&self, idx: u32) -> u64 {
        match &self.nodes[idx as usize] {
            PatNode::Internal { split_index, .. } => *split_index,
            PatNode::Leaf { .. } => u64::MAX,
        }
    }

    /// Checks every structural invariant against the backing store.
    pub fn validate(&self, strings: &mut [LazyBitString]) -> Vec<Violation> {
        let mut violations = Vec::new();
        let Some(root) = self.root else {
            if !self.nodes.is_empty() || self.leaf_count != 0 {
                violations.push(Violation::UnreachableNodes {
                    count: self.nodes.len(),
                });
            }
            return violations;
        };
        enum Task {
            Visit(u32),
            PushPath { split: u64, dir: usize },
            PopPath,
        }
        let mut visited = vec![false; self.nodes.len()];
        let mut path: Vec<(u64, usize)> = Vec::new();
        let mut tasks = vec![Task::Visit(root)];
        let mut leaves = 0u64;
        let mut internal = 0u64;
        let mut height = 0u64;
        while let Some(task) = tasks.pop() {
            match task {
                Task::PushPath { split, dir } => path.push((split, dir)),
                Task::PopPath => {
                    path.pop();
                }
                Task::Visit(idx) => {
                    if idx as usize >= self.nodes.len() {
                        continue; // reported as DanglingChild by the parent
                    }
                    if visited[idx as usize] {
                        violations.push(Violation::NodeRevisited { node: idx });
                        continue;
                    }
                    visited[idx as usize] = true;
                    match &self.nodes[idx as usize] {
                        PatNode::Internal {
                            split_index,
                            children,
                        } => {
                            internal += 1;
                            if let Some(&(parent_split, _)) = path.last() {
                                if *split_index <= parent_split {
                                    violations.push(Violation::NonIncreasingSplit {
                                        node: idx,
                                        parent_split,
                                        split: *split_index,
                                    });
                                }
                            }
                            if children[0] == children[1] {
                                violations.push(Violation::OutDegreeOne { node: idx });
                            }
                            for (dir, &child) in children.iter().enumerate() {
                                if child as usize >= self.nodes.len() {
                                    violations.push(Violation::DanglingChild {
                                        node: idx,
                                        child,
                                    });
                                    continue;
                                }
                                tasks.push(Task::PopPath);
                                tasks.push(Task::Visit(child));
                                tasks.push(Task::PushPath {
                                    split: *split_index,
                                    dir,
                                });
                            }
                        }
                        PatNode::Leaf {
                            string_id,
                            witness_prefix_length,
                        } => {
                            leaves += 1;
                            height = height.max(path.len() as u64);
                            let parent_split = path.last().map(|&(s, _)| s).unwrap_or(0);
                            if *witness_prefix_length != parent_split {
                                violations.push(Violation::WitnessMismatch {
                                    leaf: idx,
                                    witness: *witness_prefix_length,
                                    parent_split,
                                });
                            }
                            if *string_id as usize >= strings.len() {
                                violations.push(Violation::StringIdOutOfRange {
                                    leaf: idx,
                                    string_id: *string_id,
                                });
                                continue;
                            }
                            let s = &mut strings[*string_id as usize];
                            for &(split, dir) in &path {
                                match s.bit_at(split) {
                                    Ok(bit) if bit as usize == dir => {}
                                    Ok(_) => violations.push(Violation::LeafBitMismatch {
                                        leaf: idx,
                                        split_index: split,
                                    }),
                                    Err(_) => violations.push(Violation::LeafBitUnavailable {
                                        leaf: idx,
                                        split_index: split,
                                    }),
                                }
                            }
                        }
                    }
                }
            }
        }
        if internal + 1 != leaves {
            violations.push(Violation::NodeCountMismatch { internal, leaves });
        }
        if self.leaf_count as u64 != leaves {
            violations.push(Violation::LeafCountMismatch {
                recorded: self.leaf_count,
                actual: leaves as u32,
            });
        }
        let unreachable = visited.iter().filter(|&&v| !v).count();
        if unreachable > 0 {
            violations.push(Violation::UnreachableNodes { count: unreachable });
        }
        if leaves > 0 && height > leaves - 1 {
            violations.push(Violation::HeightAboveLeafBound {
                height,
                bound: leaves - 1,
            });
        }
        violations
    }

    /// Structural identity: same shape, split indices, leaf string ids, and
    /// witness lengths.
    pub fn structure_eq(&self, other: &PatriciaTree) -> bool {
        match (self.root, other.root) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                let mut stack = vec![(a, b)];
                while let Some((x, y)) = stack.pop() {
                    match (&self.nodes[x as usize], &other.nodes[y as usize]) {
                        (
                            PatNode::Internal {
                                split_index: sa,
                                children: ca,
                            },
                            PatNode::Internal {
                                split_index: sb,
                                children: cb,
                            },
                        ) => {
                            if sa != sb {
                                return false;
                            }
                            stack.push((ca[0], cb[0]));
                            stack.push((ca[1], cb[1]));
                        }
                        (
                            PatNode::Leaf {
                                string_id: ia,
                                witness_prefix_length: wa,
                            },
                            PatNode::Leaf {
                                string_id: ib,
                                witness_prefix_length: wb,
                            },
                        ) => {
                            if ia != ib || wa != wb {
                                return false;
                            }
                        }
                        _ => return false,
                    }
                }
                true
            }
            _ => false,
        }
    }

    /// Debug dump of the arena; not a stability-guaranteed format.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .map(|n| match n {
                PatNode::Internal {
                    split_index,
                    children,
                } => json!({
                    "split_index": split_index,
                    "child0": children[0],
                    "child1": children[1],
                }),
                PatNode::Leaf {
                    string_id,
                    witness_prefix_length,
                } => json!({
                    "string_id": string_id,
                    "witness_prefix_length": witness_prefix_length,
                }),
            })
            .collect();
        json!({
            "root": self.root,
            "leaf_count": self.leaf_count,
            "nodes": nodes,
        })
    }
}

fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}
