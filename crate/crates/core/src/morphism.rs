//! Morphisms of labeled transition systems: a state map plus a label map
//! that send the initial state to the initial state and transitions to
//! transitions.
//!
//! Most of this crate works in the fixed-alphabet regime where morphisms keep
//! labels unchanged ([`Morphism::in_tran_l`]); the open-map and faithfulness
//! checks require it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::SysIndex;
use crate::ts::{Label, Run, StateId, Transition, TransitionSystem};

/// A pair of total maps between two systems.
///
/// Construction enforces that the maps are total on the source states and
/// labels and land in the target states and labels. Whether the maps actually
/// form a morphism (initial state and transitions preserved) is reported by
/// [`Morphism::check`], so ill-behaved candidate maps can still be
/// represented and examined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<TransitionSystem>,
    target: Arc<TransitionSystem>,
    state_map: BTreeMap<StateId, StateId>,
    label_map: BTreeMap<Label, Label>,
}

impl Morphism {
    /// Builds a morphism candidate, checking totality and membership of both
    /// maps (but not the morphism conditions; see [`Morphism::check`]).
    pub fn new(
        source: Arc<TransitionSystem>,
        target: Arc<TransitionSystem>,
        state_map: BTreeMap<StateId, StateId>,
        label_map: BTreeMap<Label, Label>,
    ) -> Result<Self> {
        for state in source.states() {
            match state_map.get(state) {
                None => {
                    return Err(Error::PartialStateMap {
                        state: state.clone(),
                    })
                }
                Some(image) if !target.states().contains(image) => {
                    return Err(Error::UnknownState {
                        state: image.clone(),
                        system: target.name().to_owned(),
                    })
                }
                Some(_) => {}
            }
        }
        for state in state_map.keys() {
            if !source.states().contains(state) {
                return Err(Error::UnknownState {
                    state: state.clone(),
                    system: source.name().to_owned(),
                });
            }
        }
        for label in source.labels() {
            match label_map.get(label) {
                None => {
                    return Err(Error::PartialLabelMap {
                        label: label.clone(),
                    })
                }
                Some(image) if !target.labels().contains(image) => {
                    return Err(Error::UnknownLabel {
                        label: image.clone(),
                        system: target.name().to_owned(),
                    })
                }
                Some(_) => {}
            }
        }
        for label in label_map.keys() {
            if !source.labels().contains(label) {
                return Err(Error::UnknownLabel {
                    label: label.clone(),
                    system: source.name().to_owned(),
                });
            }
        }
        Ok(Morphism {
            source,
            target,
            state_map,
            label_map,
        })
    }

    /// A label-preserving morphism between systems over the same label set.
    pub fn new_label_preserving(
        source: Arc<TransitionSystem>,
        target: Arc<TransitionSystem>,
        state_map: BTreeMap<StateId, StateId>,
    ) -> Result<Self> {
        if source.labels() != target.labels() {
            return Err(Error::LabelSetMismatch {
                left: source.name().to_owned(),
                right: target.name().to_owned(),
            });
        }
        let label_map = source.labels().iter().map(|l| (l.clone(), l.clone())).collect();
        Self::new(source, target, state_map, label_map)
    }

    /// The identity morphism on `ts`.
    pub fn identity(ts: &Arc<TransitionSystem>) -> Self {
        Morphism {
            source: Arc::clone(ts),
            target: Arc::clone(ts),
            state_map: ts.states().iter().map(|s| (s.clone(), s.clone())).collect(),
            label_map: ts.labels().iter().map(|l| (l.clone(), l.clone())).collect(),
        }
    }

    pub fn source(&self) -> &Arc<TransitionSystem> {
        &self.source
    }

    pub fn target(&self) -> &Arc<TransitionSystem> {
        &self.target
    }

    pub fn state_map(&self) -> &BTreeMap<StateId, StateId> {
        &self.state_map
    }

    pub fn label_map(&self) -> &BTreeMap<Label, Label> {
        &self.label_map
    }

    pub fn state_image(&self, state: &StateId) -> Option<&StateId> {
        self.state_map.get(state)
    }

    pub fn label_image(&self, label: &Label) -> Option<&Label> {
        self.label_map.get(label)
    }

    /// True when every label maps to itself.
    pub fn has_identity_label_map(&self) -> bool {
        self.label_map.iter().all(|(l, m)| l == m)
    }

    /// True in the fixed-alphabet regime: equal label sets and the identity
    /// label map.
    pub fn in_tran_l(&self) -> bool {
        self.source.labels() == self.target.labels() && self.has_identity_label_map()
    }

    pub(crate) fn require_tran_l(&self) -> Result<()> {
        if self.source.labels() != self.target.labels() {
            return Err(Error::LabelSetMismatch {
                left: self.source.name().to_owned(),
                right: self.target.name().to_owned(),
            });
        }
        if !self.has_identity_label_map() {
            return Err(Error::LabelMapNotIdentity {
                from: self.source.name().to_owned(),
                to: self.target.name().to_owned(),
            });
        }
        Ok(())
    }

    /// Checks the morphism conditions: the initial state maps to the initial
    /// state and every transition maps to a transition. Empty report means
    /// the candidate is a morphism.
    pub fn check(&self) -> MorphismReport {
        let mut violations = Vec::new();
        let mapped_initial = &self.state_map[self.source.initial()];
        if mapped_initial != self.target.initial() {
            violations.push(MorphismViolation::InitialNotPreserved {
                image: mapped_initial.clone(),
                expected: self.target.initial().clone(),
            });
        }
        for t in self.source.transitions() {
            // Transitions of invalid systems may use undeclared states or
            // labels; those fall outside the total maps and are reported
            // rather than panicking.
            let image = match (
                self.state_map.get(&t.source),
                self.label_map.get(&t.label),
                self.state_map.get(&t.target),
            ) {
                (Some(s), Some(l), Some(d)) => Transition {
                    source: s.clone(),
                    label: l.clone(),
                    target: d.clone(),
                },
                _ => {
                    violations.push(MorphismViolation::TransitionNotPreserved {
                        transition: t.clone(),
                        image: None,
                    });
                    continue;
                }
            };
            if !self.target.has_transition(&image) {
                violations.push(MorphismViolation::TransitionNotPreserved {
                    transition: t.clone(),
                    image: Some(image),
                });
            }
        }
        MorphismReport { violations }
    }

    /// True when [`Morphism::check`] finds no violations.
    pub fn is_valid(&self) -> bool {
        self.check().is_empty()
    }

    /// Maps a run of the source system to a run of the target system.
    ///
    /// The run is re-checked against the source; requires a valid morphism
    /// (an invalid one is reported as such if the image fails to be a run).
    pub fn map_run(&self, run: &Run) -> Result<Run> {
        let run = Run::new(&self.source, run.word().to_vec(), run.states().to_vec())?;
        let word: Vec<Label> = run
            .word()
            .iter()
            .map(|l| self.label_map[l].clone())
            .collect();
        let states: Vec<StateId> = run
            .states()
            .iter()
            .map(|s| self.state_map[s].clone())
            .collect();
        Run::new(&self.target, word, states).map_err(|_| Error::InvalidMorphism {
            from: self.source.name().to_owned(),
            to: self.target.name().to_owned(),
            detail: "the image of a run is not a run of the target".to_owned(),
        })
    }

    /// Composition: `self` followed by `after` (so `after . self`).
    pub fn then(&self, after: &Morphism) -> Result<Morphism> {
        if **after.source() != *self.target {
            return Err(Error::ComposeMismatch {
                first_target: self.target.name().to_owned(),
                second_source: after.source.name().to_owned(),
            });
        }
        let state_map = self
            .state_map
            .iter()
            .map(|(s, mid)| (s.clone(), after.state_map[mid].clone()))
            .collect();
        let label_map = self
            .label_map
            .iter()
            .map(|(l, mid)| (l.clone(), after.label_map[mid].clone()))
            .collect();
        Ok(Morphism {
            source: Arc::clone(&self.source),
            target: Arc::clone(&after.target),
            state_map,
            label_map,
        })
    }

    /// Open-map check, label-preserving case: at every reachable source
    /// state `p`, every transition of the target out of the image of `p`
    /// lifts to a transition out of `p` with the same label and a matching
    /// target image.
    ///
    /// This local condition is equivalent to the path-lifting property: runs
    /// extend step by step, and each step is exactly one lifting instance.
    /// Requires a valid morphism; errors when the label map is not the
    /// identity on a shared label set.
    pub fn is_open(&self) -> Result<bool> {
        self.require_tran_l()?;
        debug_assert!(self.is_valid(), "openness of an invalid morphism");
        let src = SysIndex::new(&self.source);
        let tgt = SysIndex::new(&self.target);
        let image = self.indexed_state_map(&src, &tgt);
        // Label positions agree because the label sets are equal.
        let reachable = src.reachable_mask();
        for p in 0..src.state_count() {
            if !reachable[p] {
                continue;
            }
            for &(label, q_target) in &tgt.out[image[p]] {
                let lifts = src
                    .out_with_label(p, label)
                    .iter()
                    .any(|&(_, p_next)| image[p_next] == q_target);
                if !lifts {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Bounded faithfulness check, label-preserving case: along every run of
    /// length at most `depth`, no two distinct same-label steps from the same
    /// state have images that coincide. Equivalently, no source state within
    /// `depth - 1` steps of the initial state has two distinct equal-label
    /// successors with the same image.
    ///
    /// `depth` 0 is vacuously true. Requires a valid morphism; errors when
    /// the label map is not the identity on a shared label set.
    pub fn is_faithful_on_paths(&self, depth: usize) -> Result<bool> {
        self.require_tran_l()?;
        debug_assert!(self.is_valid(), "faithfulness of an invalid morphism");
        if depth == 0 {
            return Ok(true);
        }
        let src = SysIndex::new(&self.source);
        let tgt = SysIndex::new(&self.target);
        let image = self.indexed_state_map(&src, &tgt);
        // BFS layers up to distance depth - 1.
        let mut dist = vec![usize::MAX; src.state_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[src.initial] = 0;
        queue.push_back(src.initial);
        while let Some(p) = queue.pop_front() {
            if dist[p] >= depth - 1 {
                continue;
            }
            for &(_, next) in &src.out[p] {
                if dist[next] == usize::MAX {
                    dist[next] = dist[p] + 1;
                    queue.push_back(next);
                }
            }
        }
        for p in 0..src.state_count() {
            if dist[p] > depth - 1 {
                continue;
            }
            let edges = &src.out[p];
            let mut i = 0;
            while i < edges.len() {
                let label = edges[i].0;
                let mut j = i;
                while j < edges.len() && edges[j].0 == label {
                    j += 1;
                }
                // Targets in edges[i..j] are pairwise distinct; two of them
                // sharing an image break faithfulness.
                let mut images: Vec<usize> = edges[i..j].iter().map(|&(_, d)| image[d]).collect();
                images.sort_unstable();
                if images.windows(2).any(|w| w[0] == w[1]) {
                    return Ok(false);
                }
                i = j;
            }
        }
        Ok(true)
    }

    fn indexed_state_map(&self, src: &SysIndex<'_>, tgt: &SysIndex<'_>) -> Vec<usize> {
        src.states
            .iter()
            .map(|s| tgt.state_pos(&self.state_map[*s]).expect("image is a target state"))
            .collect()
    }
}

/// One violation of the morphism conditions found by [`Morphism::check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    InitialNotPreserved {
        image: StateId,
        expected: StateId,
    },
    /// `transition` has no counterpart in the target; `image` is the mapped
    /// transition when the maps cover it.
    TransitionNotPreserved {
        transition: Transition,
        image: Option<Transition>,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::InitialNotPreserved { image, expected } => write!(
                f,
                "initial state maps to `{image}`, expected the target initial state `{expected}`"
            ),
            MorphismViolation::TransitionNotPreserved {
                transition,
                image: Some(image),
            } => write!(f, "transition {transition} maps to {image}, which the target lacks"),
            MorphismViolation::TransitionNotPreserved {
                transition,
                image: None,
            } => write!(f, "transition {transition} is not covered by the maps"),
        }
    }
}

/// The list of morphism-condition violations, empty for a valid morphism.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphismReport {
    violations: Vec<MorphismViolation>,
}

impl MorphismReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[MorphismViolation] {
        &self.violations
    }
}

impl fmt::Display for MorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
