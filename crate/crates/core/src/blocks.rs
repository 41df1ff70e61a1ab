//! Ordered block partitions of decision points.
//!
//! A partition respects the treeplex ordering when no block holds an ancestor
//! of a decision point in a later block, so a cyclic pass over the blocks
//! always updates a subtree before the decision points above it.

use std::str::FromStr;

use crate::error::{PartitionError, SolverError};
use crate::treeplex::{Treeplex, ROOT_SEQ};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    /// Blocks are kept in the given order; each block is sorted bottom-up.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable_by(|a, b| b.cmp(a));
        }
        BlockPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every decision point.
    pub fn block_of(&self, n_points: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n_points];
        for (i, b) in self.blocks.iter().enumerate() {
            for &j in b {
                out[j] = i;
            }
        }
        out
    }

    /// Sets of ids, for order-insensitive comparison within blocks.
    pub fn as_sorted_sets(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut s = b.clone();
                s.sort_unstable();
                s
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockStrategy {
    Single,
    Infosets,
    Children,
    Postorder,
}

impl BlockStrategy {
    pub const ALL: [BlockStrategy; 4] = [
        BlockStrategy::Single,
        BlockStrategy::Infosets,
        BlockStrategy::Children,
        BlockStrategy::Postorder,
    ];

    pub fn build(self, t: &Treeplex) -> Result<BlockPartition, PartitionError> {
        match self {
            BlockStrategy::Single => single_block(t),
            BlockStrategy::Infosets => infoset_blocks(t),
            BlockStrategy::Children => children_blocks(t),
            BlockStrategy::Postorder => postorder_blocks(t),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockStrategy::Single => "single",
            BlockStrategy::Infosets => "infosets",
            BlockStrategy::Children => "children",
            BlockStrategy::Postorder => "postorder",
        }
    }
}

impl FromStr for BlockStrategy {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, SolverError> {
        BlockStrategy::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| SolverError::Config(format!("unknown block strategy '{s}'")))
    }
}

fn non_empty(t: &Treeplex) -> Result<(), PartitionError> {
    if t.n_points() == 0 {
        return Err(PartitionError::EmptyTreeplex);
    }
    Ok(())
}

pub fn single_block(t: &Treeplex) -> Result<BlockPartition, PartitionError> {
    non_empty(t)?;
    Ok(BlockPartition::new(vec![t.topo_order().to_vec()]))
}

/// One block per decision point, bottom-up.
pub fn infoset_blocks(t: &Treeplex) -> Result<BlockPartition, PartitionError> {
    non_empty(t)?;
    Ok(BlockPartition::new(
        t.topo_order().iter().map(|&j| vec![j]).collect(),
    ))
}

/// Groups the children of each decision point (over all its actions) into one
/// block, with the root decision points forming their own block. Blocks are
/// ordered by depth, deepest first; blocks at the same depth keep the
/// breadth-first order of their parents.
pub fn children_blocks(t: &Treeplex) -> Result<BlockPartition, PartitionError> {
    non_empty(t)?;
    let mut levels: Vec<(usize, Vec<usize>)> = vec![(0, t.children(ROOT_SEQ).to_vec())];
    let mut explore: std::collections::VecDeque<(usize, usize)> =
        t.children(ROOT_SEQ).iter().map(|&j| (j, 0)).collect();
    while let Some((j, depth)) = explore.pop_front() {
        let mut block = Vec::new();
        for s in t.point(j).seqs() {
            for &c in t.children(s) {
                block.push(c);
                explore.push_back((c, depth + 1));
            }
        }
        if !block.is_empty() {
            levels.push((depth + 1, block));
        }
    }
    levels.sort_by_key(|l| std::cmp::Reverse(l.0));
    Ok(BlockPartition::new(
        levels.into_iter().map(|(_, b)| b).collect(),
    ))
}

fn postorder(t: &Treeplex, seq: usize, out: &mut Vec<usize>) {
    for &c in t.children(seq) {
        for s in t.point(c).seqs() {
            postorder(t, s, out);
        }
    }
    out.extend_from_slice(t.children(seq));
}

/// Postorder traversal with siblings under one parent sequence kept together;
/// a new block starts only when a decision point would share a block with one
/// of its children.
pub fn postorder_blocks(t: &Treeplex) -> Result<BlockPartition, PartitionError> {
    non_empty(t)?;
    let mut order = Vec::with_capacity(t.n_points());
    postorder(t, ROOT_SEQ, &mut order);
    let mut in_current = vec![false; t.n_points()];
    let mut blocks = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for j in order {
        let clash = t
            .point(j)
            .seqs()
            .any(|s| t.children(s).iter().any(|&c| in_current[c]));
        if clash {
            for &c in &current {
                in_current[c] = false;
            }
            blocks.push(std::mem::take(&mut current));
        }
        current.push(j);
        in_current[j] = true;
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    Ok(BlockPartition::new(blocks))
}

/// Checks coverage, disjointness and that no block holds an ancestor of a
/// decision point in a later block, by walking every path to the root.
pub fn validate_partition(p: &BlockPartition, t: &Treeplex) -> Result<(), PartitionError> {
    let n = t.n_points();
    let mut block = vec![usize::MAX; n];
    for (i, b) in p.blocks.iter().enumerate() {
        for &j in b {
            if j >= n {
                return Err(PartitionError::UnknownPoint { point: j });
            }
            if block[j] != usize::MAX {
                return Err(PartitionError::Duplicate { point: j });
            }
            block[j] = i;
        }
    }
    if let Some(j) = block.iter().position(|&b| b == usize::MAX) {
        return Err(PartitionError::Missing { point: j });
    }
    for j_desc in 0..n {
        let mut cur = t.point(j_desc).parent_point();
        while let Some(j) = cur {
            if block[j] < block[j_desc] {
                return Err(PartitionError::Violation {
                    i: block[j],
                    i_desc: block[j_desc],
                    j,
                    j_desc,
                });
            }
            cur = t.point(j).parent_point();
        }
    }
    Ok(())
}

/// Merges the tail blocks of the longer partition into its block number
/// `min(s_x, s_y)` so both have the same length.
pub fn align_partitions(
    px: &BlockPartition,
    py: &BlockPartition,
) -> (BlockPartition, BlockPartition) {
    let s = px.len().min(py.len());
    let fold = |p: &BlockPartition| {
        if p.len() <= s || s == 0 {
            return p.clone();
        }
        let mut blocks = p.blocks[..s].to_vec();
        for b in &p.blocks[s..] {
            blocks[s - 1].extend_from_slice(b);
        }
        BlockPartition::new(blocks)
    };
    (fold(px), fold(py))
}
