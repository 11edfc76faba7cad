//! Shared generators and independent brute-force oracles for the
//! integration suites.
//!
//! The oracles restate the definitions directly (subset enumeration,
//! explicit path search) and never call the algorithms they are used to
//! check, so agreement between the two is evidence rather than a tautology.

// Each integration test target compiles this module separately and uses a
// different slice of it.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use bisimctl::{Label, Morphism, StateId, Transition, TransitionSystem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a system from literals.
pub fn sys(
    name: &str,
    labels: &[&str],
    states: &[&str],
    init: &str,
    trans: &[(&str, &str, &str)],
) -> Arc<TransitionSystem> {
    Arc::new(TransitionSystem::new(
        name,
        labels.iter().map(|l| Label::from(*l)),
        states.iter().map(|s| StateId::from(*s)),
        init,
        trans.iter().map(|(s, l, t)| Transition::new(*s, *l, *t)),
    ))
}

/// The branching specification used across the reference tests: two `a`
/// moves from the start, then `b` on one branch and `c` on the other.
pub fn spec_system() -> Arc<TransitionSystem> {
    sys(
        "spec",
        &["a", "b", "c"],
        &["p0", "p1", "p2", "p3"],
        "p0",
        &[
            ("p0", "a", "p1"),
            ("p0", "a", "p2"),
            ("p1", "b", "p3"),
            ("p2", "c", "p3"),
        ],
    )
}

/// The deterministic reference plant: after `a` both `b` and `c` are
/// possible; a `b` detour offers `a` later.
pub fn plant_system() -> Arc<TransitionSystem> {
    sys(
        "plant",
        &["a", "b", "c"],
        &["q0", "q1", "q2", "q3"],
        "q0",
        &[
            ("q0", "a", "q1"),
            ("q0", "b", "q2"),
            ("q1", "b", "q3"),
            ("q1", "c", "q3"),
            ("q2", "a", "q3"),
        ],
    )
}

/// A random system: 1..=`max_states` states over the given labels, each
/// possible transition kept with probability `density`.
pub fn random_system(
    rng: &mut ChaCha8Rng,
    name: &str,
    max_states: usize,
    labels: &[&str],
    density: f64,
) -> Arc<TransitionSystem> {
    let n = rng.gen_range(1..=max_states);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut trans = Vec::new();
    for s in 0..n {
        for l in labels {
            for t in 0..n {
                if rng.gen_bool(density) {
                    trans.push(Transition::new(states[s].as_str(), *l, states[t].as_str()));
                }
            }
        }
    }
    Arc::new(TransitionSystem::new(
        name,
        labels.iter().map(|l| Label::from(*l)),
        states.iter().map(|s| StateId::from(s.as_str())),
        states[0].as_str(),
        trans,
    ))
}

/// A random deterministic system with exactly `n` states. Every state after
/// the first gets one incoming transition from an earlier state (so most of
/// the system is reachable), then each state is topped up to `out_degree`
/// outgoing transitions on distinct labels.
pub fn random_deterministic_system(
    rng: &mut ChaCha8Rng,
    name: &str,
    n: usize,
    labels: &[&str],
    out_degree: usize,
) -> Arc<TransitionSystem> {
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut trans = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let free: Vec<usize> = (0..labels.len()).filter(|l| !used[j].contains(l)).collect();
        if let Some(&l) = free.choose(rng) {
            used[j].insert(l);
            trans.push(Transition::new(
                states[j].as_str(),
                labels[l],
                states[i].as_str(),
            ));
        }
    }
    let cap = out_degree.min(labels.len());
    for s in 0..n {
        while used[s].len() < cap {
            let free: Vec<usize> = (0..labels.len()).filter(|l| !used[s].contains(l)).collect();
            let &l = free.choose(rng).expect("below cap leaves a free label");
            used[s].insert(l);
            let t = rng.gen_range(0..n);
            trans.push(Transition::new(
                states[s].as_str(),
                labels[l],
                states[t].as_str(),
            ));
        }
    }
    Arc::new(TransitionSystem::new(
        name,
        labels.iter().map(|l| Label::from(*l)),
        states.iter().map(|s| StateId::from(s.as_str())),
        states[0].as_str(),
        trans,
    ))
}

/// A specification guaranteed to be simulated by `plant`: each spec state
/// `si` shadows a plant state `h(si)` and only copies transitions whose
/// plant counterpart exists, so `{(s, h(s))}` is a simulation from the
/// result to the plant. `keep_prob` tunes how many of the liftable
/// transitions the spec keeps.
pub fn simulated_spec(
    rng: &mut ChaCha8Rng,
    name: &str,
    plant: &Arc<TransitionSystem>,
    n: usize,
    keep_prob: f64,
) -> Arc<TransitionSystem> {
    let plant_states: Vec<&StateId> = plant.states().iter().collect();
    let spec_states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut h: Vec<&StateId> = vec![plant.initial()];
    for _ in 1..n {
        h.push(plant_states[rng.gen_range(0..plant_states.len())]);
    }
    let mut preimages: BTreeMap<&StateId, Vec<usize>> = BTreeMap::new();
    for (i, image) in h.iter().enumerate() {
        preimages.entry(image).or_default().push(i);
    }
    let mut trans = Vec::new();
    for i in 0..n {
        for (label, targets) in plant.transitions_from(h[i]) {
            for target in targets {
                let Some(js) = preimages.get(target) else {
                    continue;
                };
                for &j in js {
                    if rng.gen_bool(keep_prob) {
                        trans.push(Transition::new(
                            spec_states[i].as_str(),
                            label.as_str(),
                            spec_states[j].as_str(),
                        ));
                    }
                }
            }
        }
    }
    Arc::new(TransitionSystem::new(
        name,
        plant.labels().iter().cloned(),
        spec_states.iter().map(|s| StateId::from(s.as_str())),
        spec_states[0].as_str(),
        trans,
    ))
}

/// A random valid morphism onto `target`: the source unfolds each target
/// state into 1..=`copies` fresh states and keeps each liftable transition
/// with probability `lift_prob`, so every source transition projects to a
/// target one by construction. Low probabilities drop liftings and tend to
/// break openness; high ones tend to preserve it.
pub fn random_morphism_onto(
    rng: &mut ChaCha8Rng,
    target: &Arc<TransitionSystem>,
    copies: usize,
    lift_prob: f64,
) -> Morphism {
    let mut x_states: Vec<String> = Vec::new();
    let mut state_map: BTreeMap<StateId, StateId> = BTreeMap::new();
    let mut copies_of: BTreeMap<&StateId, Vec<String>> = BTreeMap::new();
    for y in target.states() {
        let k = rng.gen_range(1..=copies);
        for i in 0..k {
            let x = format!("{y}_{i}");
            x_states.push(x.clone());
            state_map.insert(StateId::from(x.as_str()), y.clone());
            copies_of.entry(y).or_default().push(x);
        }
    }
    let initial = copies_of[target.initial()][0].clone();
    let mut trans = Vec::new();
    for y in target.states() {
        for x in &copies_of[y] {
            for (label, targets) in target.transitions_from(y) {
                for y2 in targets {
                    for x2 in &copies_of[y2] {
                        if rng.gen_bool(lift_prob) {
                            trans.push(Transition::new(
                                x.as_str(),
                                label.as_str(),
                                x2.as_str(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let source = Arc::new(TransitionSystem::new(
        format!("{}_unfold", target.name()),
        target.labels().iter().cloned(),
        x_states.iter().map(|s| StateId::from(s.as_str())),
        initial.as_str(),
        trans,
    ));
    Morphism::new_label_preserving(source, Arc::clone(target), state_map)
        .expect("unfolding maps into declared states")
}

/// Every system with 1..=`max_states` states over the labels: states are
/// `<prefix>0..`, the initial state is `<prefix>0`, and there is one system
/// per subset of the possible transitions. Grows as `2^(n^2 |L|)`; callers
/// stay at 2 states and 2 labels.
pub fn all_systems(prefix: &str, labels: &[&str], max_states: usize) -> Vec<Arc<TransitionSystem>> {
    let mut result = Vec::new();
    for n in 1..=max_states {
        let states: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let mut slots = Vec::new();
        for s in 0..n {
            for l in labels {
                for t in 0..n {
                    slots.push((s, *l, t));
                }
            }
        }
        assert!(slots.len() < 32, "transition alphabet too large to enumerate");
        for mask in 0u64..(1 << slots.len()) {
            let trans = slots
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (s, l, t))| {
                    Transition::new(states[*s].as_str(), *l, states[*t].as_str())
                });
            result.push(Arc::new(TransitionSystem::new(
                format!("{prefix}_{n}_{mask}"),
                labels.iter().map(|l| Label::from(*l)),
                states.iter().map(|s| StateId::from(s.as_str())),
                states[0].as_str(),
                trans,
            )));
        }
    }
    result
}

/// The simulation condition, straight from the definition: the initial
/// pair is present, and every left transition from a paired state is
/// matched by an equally labeled right transition staying in the set.
pub fn simulation_condition(
    left: &TransitionSystem,
    right: &TransitionSystem,
    pairs: &BTreeSet<(StateId, StateId)>,
) -> bool {
    if !pairs.contains(&(left.initial().clone(), right.initial().clone())) {
        return false;
    }
    pairs.iter().all(|(p, q)| {
        left.transitions_from(p).all(|(label, targets)| {
            targets.iter().all(|p2| {
                right
                    .successors(q, label)
                    .any(|q2| pairs.contains(&(p2.clone(), q2.clone())))
            })
        })
    })
}

/// The bisimulation condition: the simulation condition plus its transpose.
pub fn bisimulation_condition(
    left: &TransitionSystem,
    right: &TransitionSystem,
    pairs: &BTreeSet<(StateId, StateId)>,
) -> bool {
    let transposed: BTreeSet<(StateId, StateId)> =
        pairs.iter().map(|(p, q)| (q.clone(), p.clone())).collect();
    simulation_condition(left, right, pairs) && simulation_condition(right, left, &transposed)
}

fn oracle_union(
    left: &TransitionSystem,
    right: &TransitionSystem,
    condition: impl Fn(&TransitionSystem, &TransitionSystem, &BTreeSet<(StateId, StateId)>) -> bool,
) -> Option<BTreeSet<(StateId, StateId)>> {
    let all: Vec<(StateId, StateId)> = left
        .states()
        .iter()
        .flat_map(|p| right.states().iter().map(move |q| (p.clone(), q.clone())))
        .collect();
    assert!(all.len() < 24, "state product too large to enumerate");
    let mut union: BTreeSet<(StateId, StateId)> = BTreeSet::new();
    let mut found = false;
    for mask in 0u32..(1u32 << all.len()) {
        let pairs: BTreeSet<(StateId, StateId)> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, pair)| pair.clone())
            .collect();
        if condition(left, right, &pairs) {
            found = true;
            union.extend(pairs);
        }
    }
    found.then_some(union)
}

/// The union of all simulations, by checking every subset of the state
/// product. Exponential; callers keep the product small.
pub fn oracle_greatest_simulation(
    left: &TransitionSystem,
    right: &TransitionSystem,
) -> Option<BTreeSet<(StateId, StateId)>> {
    oracle_union(left, right, simulation_condition)
}

/// The union of all bisimulations, by subset enumeration.
pub fn oracle_greatest_bisimulation(
    left: &TransitionSystem,
    right: &TransitionSystem,
) -> Option<BTreeSet<(StateId, StateId)>> {
    oracle_union(left, right, bisimulation_condition)
}

/// Brute-force path lifting. Every run of the source whose state witness
/// has pairwise-distinct states is a mapped path object; the oracle demands
/// that every one-letter extension of its image lifts back. This is exact:
/// a failing square with a longer extension contains a failing one-letter
/// square at its first unliftable step, and a witness with repeated states
/// shortens to a simple one reaching the same state.
pub fn oracle_is_open(f: &Morphism) -> bool {
    let source = f.source();
    let target = f.target();
    let mut stack: Vec<Vec<StateId>> = vec![vec![source.initial().clone()]];
    while let Some(path) = stack.pop() {
        let here = path.last().expect("paths are nonempty");
        let image = &f.state_map()[here];
        for (label, targets) in target.transitions_from(image) {
            for y2 in targets {
                let lifts = source
                    .successors(here, label)
                    .any(|x2| f.state_map()[x2] == *y2);
                if !lifts {
                    return false;
                }
            }
        }
        for (_, targets) in source.transitions_from(here) {
            for next in targets {
                if !path.contains(next) {
                    let mut longer = path.clone();
                    longer.push(next.clone());
                    stack.push(longer);
                }
            }
        }
    }
    true
}

/// Witness search for a run, by explicit depth-first search.
pub fn oracle_is_run(ts: &TransitionSystem, word: &[Label]) -> bool {
    fn step(ts: &TransitionSystem, at: &StateId, word: &[Label]) -> bool {
        match word.split_first() {
            None => true,
            Some((l, rest)) => ts.successors(at, l).any(|next| step(ts, next, rest)),
        }
    }
    step(ts, ts.initial(), word)
}

/// Isomorphism of reachable parts: a bijection of states carrying initial
/// to initial and transitions exactly onto transitions. Backtracking with
/// degree-signature pruning; intended for test-sized systems.
pub fn isomorphic(a: &TransitionSystem, b: &TransitionSystem) -> bool {
    let a = a.reachable();
    let b = b.reachable();
    if a.labels() != b.labels()
        || a.states().len() != b.states().len()
        || a.transitions().len() != b.transitions().len()
    {
        return false;
    }
    let a_states: Vec<&StateId> = a.states().iter().collect();
    let b_states: Vec<&StateId> = b.states().iter().collect();
    let n = a_states.len();
    let pos_a: BTreeMap<&StateId, usize> =
        a_states.iter().enumerate().map(|(i, s)| (*s, i)).collect();

    fn signature(ts: &TransitionSystem, s: &StateId) -> BTreeMap<(Label, bool), usize> {
        let mut sig: BTreeMap<(Label, bool), usize> = BTreeMap::new();
        for t in ts.transitions() {
            if t.source == *s {
                *sig.entry((t.label.clone(), false)).or_default() += 1;
            }
            if t.target == *s {
                *sig.entry((t.label.clone(), true)).or_default() += 1;
            }
        }
        sig
    }
    let sig_a: Vec<_> = a_states.iter().map(|s| signature(&a, s)).collect();
    let sig_b: Vec<_> = b_states.iter().map(|s| signature(&b, s)).collect();

    // Transitions as index triples, grouped by endpoint for the
    // incremental consistency check.
    let triples: Vec<(usize, &Label, usize)> = a
        .transitions()
        .iter()
        .map(|t| (pos_a[&t.source], &t.label, pos_a[&t.target]))
        .collect();

    struct Search<'a> {
        a_states: &'a [&'a StateId],
        b_states: &'a [&'a StateId],
        a: &'a TransitionSystem,
        b: &'a TransitionSystem,
        sig_a: &'a [BTreeMap<(Label, bool), usize>],
        sig_b: &'a [BTreeMap<(Label, bool), usize>],
        triples: &'a [(usize, &'a Label, usize)],
        assign: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn consistent(&self, i: usize) -> bool {
            self.triples.iter().all(|&(s, label, t)| {
                if (s != i && t != i)
                    || self.assign[s] == usize::MAX
                    || self.assign[t] == usize::MAX
                {
                    return true;
                }
                self.b.has_transition(&Transition::new(
                    self.b_states[self.assign[s]].clone(),
                    label.clone(),
                    self.b_states[self.assign[t]].clone(),
                ))
            })
        }

        fn run(&mut self, i: usize) -> bool {
            if i == self.assign.len() {
                return true;
            }
            for j in 0..self.assign.len() {
                if self.used[j] || self.sig_a[i] != self.sig_b[j] {
                    continue;
                }
                let i_initial = self.a_states[i] == self.a.initial();
                let j_initial = self.b_states[j] == self.b.initial();
                if i_initial != j_initial {
                    continue;
                }
                self.assign[i] = j;
                self.used[j] = true;
                if self.consistent(i) && self.run(i + 1) {
                    return true;
                }
                self.assign[i] = usize::MAX;
                self.used[j] = false;
            }
            false
        }
    }

    let mut search = Search {
        a_states: &a_states,
        b_states: &b_states,
        a: &a,
        b: &b,
        sig_a: &sig_a,
        sig_b: &sig_b,
        triples: &triples,
        assign: vec![usize::MAX; n],
        used: vec![false; n],
    };
    search.run(0)
}
