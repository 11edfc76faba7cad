//! Signature-based partition refinement for bisimilarity, run on the
//! disjoint union of two systems over the same label set.
//!
//! Starting from the trivial partition, states are repeatedly re-partitioned
//! by the signature (current block, set of (label, block-of-target) pairs)
//! until stable. Two states end in the same block iff they are bisimilar.
//! Block numbering follows first occurrence in state order, so the result is
//! deterministic.

use std::collections::HashMap;

use crate::index::SysIndex;

/// Blocks of the coarsest bisimulation partition of the disjoint union,
/// returned per side. Requires equal label sets (label positions must agree
/// between the two indexes).
pub(crate) fn bisimilarity_partition(
    left: &SysIndex<'_>,
    right: &SysIndex<'_>,
) -> (Vec<usize>, Vec<usize>) {
    let n_left = left.state_count();
    let n = n_left + right.state_count();
    // Union adjacency with right-side states shifted by n_left.
    let out: Vec<Vec<(usize, usize)>> = left
        .out
        .iter()
        .cloned()
        .chain(right.out.iter().map(|edges| {
            edges.iter().map(|&(l, d)| (l, d + n_left)).collect()
        }))
        .collect();

    let mut blocks = vec![0usize; n];
    let mut block_count = 1usize;
    loop {
        let mut fresh: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next_blocks = vec![0usize; n];
        for state in 0..n {
            let mut signature: Vec<(usize, usize)> =
                out[state].iter().map(|&(l, d)| (l, blocks[d])).collect();
            signature.sort_unstable();
            signature.dedup();
            let next_id = fresh.len();
            let id = *fresh.entry((blocks[state], signature)).or_insert(next_id);
            next_blocks[state] = id;
        }
        let next_count = fresh.len();
        blocks = next_blocks;
        if next_count == block_count {
            break;
        }
        block_count = next_count;
    }
    let right_blocks = blocks.split_off(n_left);
    (blocks, right_blocks)
}
