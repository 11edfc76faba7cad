//! Finite labeled transition systems and their runs.
//!
//! A system is a finite set of states with a distinguished initial state, a
//! finite label alphabet, and a set of labeled transitions. States and labels
//! are opaque identifiers; all collections are ordered so every operation in
//! this crate is deterministic.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// An opaque state identifier.
///
/// Identifiers are compared and ordered as strings. The text format requires
/// them to be free of whitespace and `#`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(String);

impl StateId {
    pub fn new(id: impl Into<String>) -> Self {
        StateId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for StateId {
    fn from(s: &str) -> Self {
        StateId(s.to_owned())
    }
}

impl From<String> for StateId {
    fn from(s: String) -> Self {
        StateId(s)
    }
}

impl Borrow<str> for StateId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// An opaque transition label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(label: impl Into<String>) -> Self {
        Label(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl Borrow<str> for Label {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A single labeled transition `source --label--> target`.
///
/// Ordering is lexicographic by (source, label, target), which fixes the
/// canonical serialization order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub label: Label,
    pub target: StateId,
}

impl Transition {
    pub fn new(
        source: impl Into<StateId>,
        label: impl Into<Label>,
        target: impl Into<StateId>,
    ) -> Self {
        Transition {
            source: source.into(),
            label: label.into(),
            target: target.into(),
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.source, self.label, self.target)
    }
}

/// A finite labeled transition system.
///
/// The constructor assembles the value without enforcing the well-formedness
/// invariants (nonempty state and label sets, initial state declared,
/// transition endpoints and labels declared); [`TransitionSystem::validate`]
/// reports every violation. Semantic operations document validity as a
/// precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    name: String,
    labels: BTreeSet<Label>,
    states: BTreeSet<StateId>,
    initial: StateId,
    transitions: BTreeSet<Transition>,
    // Outgoing adjacency, derived from `transitions`.
    out: BTreeMap<StateId, BTreeMap<Label, BTreeSet<StateId>>>,
}

impl TransitionSystem {
    pub fn new(
        name: impl Into<String>,
        labels: impl IntoIterator<Item = Label>,
        states: impl IntoIterator<Item = StateId>,
        initial: impl Into<StateId>,
        transitions: impl IntoIterator<Item = Transition>,
    ) -> Self {
        let transitions: BTreeSet<Transition> = transitions.into_iter().collect();
        let mut out: BTreeMap<StateId, BTreeMap<Label, BTreeSet<StateId>>> = BTreeMap::new();
        for t in &transitions {
            out.entry(t.source.clone())
                .or_default()
                .entry(t.label.clone())
                .or_default()
                .insert(t.target.clone());
        }
        TransitionSystem {
            name: name.into(),
            labels: labels.into_iter().collect(),
            states: states.into_iter().collect(),
            initial: initial.into(),
            transitions,
            out,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        &self.labels
    }

    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.states
    }

    pub fn initial(&self) -> &StateId {
        &self.initial
    }

    pub fn transitions(&self) -> &BTreeSet<Transition> {
        &self.transitions
    }

    pub fn has_transition(&self, t: &Transition) -> bool {
        self.transitions.contains(t)
    }

    /// Outgoing transitions of `state`, grouped by label.
    pub fn transitions_from(
        &self,
        state: &StateId,
    ) -> impl Iterator<Item = (&Label, &BTreeSet<StateId>)> {
        self.out.get(state).into_iter().flatten().map(|(l, ts)| (l, ts))
    }

    /// Targets of `state --label--> _` transitions.
    pub fn successors(&self, state: &StateId, label: &Label) -> impl Iterator<Item = &StateId> {
        self.out
            .get(state)
            .and_then(|by_label| by_label.get(label))
            .into_iter()
            .flatten()
    }

    /// Checks the well-formedness invariants and reports every violation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.states.is_empty() {
            violations.push(Violation::EmptyStates);
        }
        if self.labels.is_empty() {
            violations.push(Violation::EmptyLabels);
        }
        if !self.states.contains(&self.initial) {
            violations.push(Violation::InitialNotDeclared(self.initial.clone()));
        }
        for t in &self.transitions {
            if !self.states.contains(&t.source) {
                violations.push(Violation::TransitionSourceUnknown(t.clone()));
            }
            if !self.labels.contains(&t.label) {
                violations.push(Violation::TransitionLabelUnknown(t.clone()));
            }
            if !self.states.contains(&t.target) {
                violations.push(Violation::TransitionTargetUnknown(t.clone()));
            }
        }
        ValidationReport { violations }
    }

    /// True when no state has two distinct transitions with the same label.
    pub fn is_deterministic(&self) -> bool {
        self.out
            .values()
            .all(|by_label| by_label.values().all(|targets| targets.len() <= 1))
    }

    /// The restriction of the system to the states reachable from the
    /// initial state. Name and label set are kept; a system that is already
    /// reachable comes back equal to itself.
    pub fn reachable(&self) -> TransitionSystem {
        let mut reach: BTreeSet<StateId> = BTreeSet::new();
        let mut frontier = vec![self.initial.clone()];
        reach.insert(self.initial.clone());
        while let Some(state) = frontier.pop() {
            for (_, targets) in self.transitions_from(&state) {
                for target in targets {
                    if reach.insert(target.clone()) {
                        frontier.push(target.clone());
                    }
                }
            }
        }
        let transitions: Vec<Transition> = self
            .transitions
            .iter()
            .filter(|t| reach.contains(&t.source) && reach.contains(&t.target))
            .cloned()
            .collect();
        TransitionSystem::new(
            self.name.clone(),
            self.labels.iter().cloned(),
            reach,
            self.initial.clone(),
            transitions,
        )
    }

    /// True when some path from the initial state spells out `word`.
    ///
    /// Requires a valid system; errors if `word` uses a label outside the
    /// label set.
    pub fn is_run(&self, word: &[Label]) -> Result<bool> {
        for label in word {
            if !self.labels.contains(label) {
                return Err(Error::UnknownLabel {
                    label: label.clone(),
                    system: self.name.clone(),
                });
            }
        }
        let mut current: BTreeSet<&StateId> = BTreeSet::new();
        current.insert(&self.initial);
        for label in word {
            let mut next = BTreeSet::new();
            for state in current {
                next.extend(self.successors(state, label));
            }
            if next.is_empty() {
                return Ok(false);
            }
            current = next;
        }
        Ok(true)
    }

    /// All run words of length at most `max_length`, in lexicographic order.
    ///
    /// The empty word is always included. Requires a valid system.
    pub fn enumerate_runs(&self, max_length: usize) -> BTreeSet<Vec<Label>> {
        let mut words = BTreeSet::new();
        words.insert(Vec::new());
        let mut level: BTreeMap<Vec<Label>, BTreeSet<&StateId>> = BTreeMap::new();
        level.insert(Vec::new(), [&self.initial].into_iter().collect());
        for _ in 0..max_length {
            let mut next_level: BTreeMap<Vec<Label>, BTreeSet<&StateId>> = BTreeMap::new();
            for (word, states) in &level {
                let mut by_label: BTreeMap<&Label, BTreeSet<&StateId>> = BTreeMap::new();
                for state in states {
                    for (label, targets) in self.transitions_from(state) {
                        by_label.entry(label).or_default().extend(targets);
                    }
                }
                for (label, targets) in by_label {
                    let mut next_word = word.clone();
                    next_word.push(label.clone());
                    next_level.insert(next_word, targets);
                }
            }
            if next_level.is_empty() {
                break;
            }
            words.extend(next_level.keys().cloned());
            level = next_level;
        }
        words
    }
}

/// A run: a label word together with a witnessing state sequence.
///
/// Constructed through [`Run::new`], which checks the run conditions against
/// a given system, so a value of this type always witnesses a real path of
/// the system it was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    word: Vec<Label>,
    states: Vec<StateId>,
}

impl Run {
    /// Checks that `states` starts at the initial state of `ts`, has length
    /// `word.len() + 1`, and steps along transitions of `ts` spelling `word`.
    pub fn new(ts: &TransitionSystem, word: Vec<Label>, states: Vec<StateId>) -> Result<Self> {
        let invalid = |detail: String| Error::InvalidRun {
            system: ts.name().to_owned(),
            detail,
        };
        if states.len() != word.len() + 1 {
            return Err(invalid(format!(
                "a word of {} labels needs {} states, found {}",
                word.len(),
                word.len() + 1,
                states.len()
            )));
        }
        if states[0] != *ts.initial() {
            return Err(invalid(format!(
                "starts at `{}`, not at the initial state `{}`",
                states[0],
                ts.initial()
            )));
        }
        for (i, label) in word.iter().enumerate() {
            let step = Transition {
                source: states[i].clone(),
                label: label.clone(),
                target: states[i + 1].clone(),
            };
            if !ts.has_transition(&step) {
                return Err(invalid(format!("missing transition {step}")));
            }
        }
        Ok(Run { word, states })
    }

    /// The empty run, sitting at the initial state.
    pub fn empty(ts: &TransitionSystem) -> Self {
        Run {
            word: Vec::new(),
            states: vec![ts.initial().clone()],
        }
    }

    pub fn word(&self) -> &[Label] {
        &self.word
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    /// Number of transitions taken.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// One well-formedness violation found by [`TransitionSystem::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyStates,
    EmptyLabels,
    InitialNotDeclared(StateId),
    TransitionSourceUnknown(Transition),
    TransitionLabelUnknown(Transition),
    TransitionTargetUnknown(Transition),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStates => write!(f, "state set is empty"),
            Violation::EmptyLabels => write!(f, "label set is empty"),
            Violation::InitialNotDeclared(s) => {
                write!(f, "initial state `{s}` is not a declared state")
            }
            Violation::TransitionSourceUnknown(t) => {
                write!(f, "transition {t} uses undeclared source state `{}`", t.source)
            }
            Violation::TransitionLabelUnknown(t) => {
                write!(f, "transition {t} uses undeclared label `{}`", t.label)
            }
            Violation::TransitionTargetUnknown(t) => {
                write!(f, "transition {t} uses undeclared target state `{}`", t.target)
            }
        }
    }
}

/// The list of violations found by [`TransitionSystem::validate`], empty for
/// a well-formed system.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
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
