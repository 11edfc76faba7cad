//! Integer-indexed view of a transition system, shared by the fixpoint
//! algorithms (simulation, partition refinement, openness). Positions follow
//! the sorted order of states and labels, so everything derived from an index
//! is deterministic.

use std::collections::BTreeMap;

use crate::ts::{Label, StateId, TransitionSystem};

pub(crate) struct SysIndex<'a> {
    pub states: Vec<&'a StateId>,
    pub initial: usize,
    /// Per state, sorted (label, target) pairs.
    pub out: Vec<Vec<(usize, usize)>>,
    /// Per state, sorted (label, source) pairs of incoming transitions.
    pub inc: Vec<Vec<(usize, usize)>>,
    state_pos: BTreeMap<&'a StateId, usize>,
}

impl<'a> SysIndex<'a> {
    /// Requires a valid system.
    pub fn new(ts: &'a TransitionSystem) -> Self {
        debug_assert!(ts.validate().is_empty(), "indexing an invalid system");
        let states: Vec<&StateId> = ts.states().iter().collect();
        let labels: Vec<&Label> = ts.labels().iter().collect();
        let state_pos: BTreeMap<&StateId, usize> =
            states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let label_pos: BTreeMap<&Label, usize> =
            labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let mut out = vec![Vec::new(); states.len()];
        let mut inc = vec![Vec::new(); states.len()];
        for t in ts.transitions() {
            let s = state_pos[&t.source];
            let l = label_pos[&t.label];
            let d = state_pos[&t.target];
            out[s].push((l, d));
            inc[d].push((l, s));
        }
        for edges in out.iter_mut().chain(inc.iter_mut()) {
            edges.sort_unstable();
        }
        let initial = state_pos[ts.initial()];
        SysIndex {
            states,
            initial,
            out,
            inc,
            state_pos,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_pos(&self, state: &StateId) -> Option<usize> {
        self.state_pos.get(state).copied()
    }

    /// The (label, target) edges of `state` carrying `label`, as a subslice
    /// of the sorted edge list.
    pub fn out_with_label(&self, state: usize, label: usize) -> &[(usize, usize)] {
        Self::label_slice(&self.out[state], label)
    }

    /// The (label, source) edges into `state` carrying `label`.
    pub fn inc_with_label(&self, state: usize, label: usize) -> &[(usize, usize)] {
        Self::label_slice(&self.inc[state], label)
    }

    fn label_slice(edges: &[(usize, usize)], label: usize) -> &[(usize, usize)] {
        let lo = edges.partition_point(|&(l, _)| l < label);
        let hi = edges.partition_point(|&(l, _)| l <= label);
        &edges[lo..hi]
    }

    /// Mask of states reachable from the initial state.
    pub fn reachable_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.states.len()];
        let mut stack = vec![self.initial];
        mask[self.initial] = true;
        while let Some(s) = stack.pop() {
            for &(_, d) in &self.out[s] {
                if !mask[d] {
                    mask[d] = true;
                    stack.push(d);
                }
            }
        }
        mask
    }
}
