//! Simulation and bisimulation relations between two systems over a shared
//! label set, their greatest fixpoints, and the span view of a relation.
//!
//! `greatest_simulation` runs a counter-based pair-removal fixpoint: for each
//! left transition and right state it tracks how many matching right
//! successors remain, and removes a pair once some left transition has no
//! match left. `greatest_bisimulation` runs signature-based partition
//! refinement on the disjoint union. Both are deterministic and independent
//! of iteration order because the greatest fixpoint is unique.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::index::SysIndex;
use crate::morphism::Morphism;
use crate::naming::render_pairs;
use crate::refine::bisimilarity_partition;
use crate::ts::{StateId, Transition, TransitionSystem};

/// A relation between the states of two systems.
///
/// Construction checks that every pair names declared states of the two
/// systems. Whether the relation is a (bi)simulation is a separate question,
/// answered by [`Relation::check_simulation`] and
/// [`Relation::check_bisimulation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    left: Arc<TransitionSystem>,
    right: Arc<TransitionSystem>,
    pairs: BTreeSet<(StateId, StateId)>,
}

impl Relation {
    pub fn new(
        left: Arc<TransitionSystem>,
        right: Arc<TransitionSystem>,
        pairs: BTreeSet<(StateId, StateId)>,
    ) -> Result<Self> {
        for (l, r) in &pairs {
            if !left.states().contains(l) {
                return Err(Error::UnknownState {
                    state: l.clone(),
                    system: left.name().to_owned(),
                });
            }
            if !right.states().contains(r) {
                return Err(Error::UnknownState {
                    state: r.clone(),
                    system: right.name().to_owned(),
                });
            }
        }
        Ok(Relation { left, right, pairs })
    }

    /// The full relation: every left state paired with every right state.
    pub fn full(left: Arc<TransitionSystem>, right: Arc<TransitionSystem>) -> Self {
        let pairs = left
            .states()
            .iter()
            .flat_map(|l| right.states().iter().map(move |r| (l.clone(), r.clone())))
            .collect();
        Relation { left, right, pairs }
    }

    pub fn left(&self) -> &Arc<TransitionSystem> {
        &self.left
    }

    pub fn right(&self) -> &Arc<TransitionSystem> {
        &self.right
    }

    pub fn pairs(&self) -> &BTreeSet<(StateId, StateId)> {
        &self.pairs
    }

    pub fn contains(&self, left: &StateId, right: &StateId) -> bool {
        self.pairs.contains(&(left.clone(), right.clone()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn require_same_labels(&self) -> Result<()> {
        if self.left.labels() != self.right.labels() {
            return Err(Error::LabelSetMismatch {
                left: self.left.name().to_owned(),
                right: self.right.name().to_owned(),
            });
        }
        Ok(())
    }

    /// True when the relation contains the pair of initial states and
    /// satisfies the left-to-right transfer condition: for every related
    /// (p1, p2) and every step p1 -l-> q1 there is a step p2 -l-> q2 with
    /// (q1, q2) related.
    ///
    /// Errors when the two systems have different label sets.
    pub fn check_simulation(&self) -> Result<bool> {
        self.require_same_labels()?;
        Ok(self.contains(self.left.initial(), self.right.initial()) && self.transfer_holds())
    }

    /// True when [`Relation::check_simulation`] holds and the transposed
    /// transfer condition holds as well (right steps are matched by left
    /// steps into related pairs).
    pub fn check_bisimulation(&self) -> Result<bool> {
        Ok(self.check_simulation()? && self.transposed_transfer_holds())
    }

    fn transfer_holds(&self) -> bool {
        self.pairs.iter().all(|(p1, p2)| {
            self.left.transitions_from(p1).all(|(label, targets)| {
                targets.iter().all(|q1| {
                    self.right
                        .successors(p2, label)
                        .any(|q2| self.pairs.contains(&(q1.clone(), q2.clone())))
                })
            })
        })
    }

    fn transposed_transfer_holds(&self) -> bool {
        self.pairs.iter().all(|(p1, p2)| {
            self.right.transitions_from(p2).all(|(label, targets)| {
                targets.iter().all(|q2| {
                    self.left
                        .successors(p1, label)
                        .any(|q1| self.pairs.contains(&(q1.clone(), q2.clone())))
                })
            })
        })
    }
}

/// The largest simulation relation from `left` to `right` that contains the
/// pair of initial states, or `None` when no simulation contains it.
///
/// With `compat` given, only pairs inside `compat` are admitted (the result
/// is the largest simulation that is a subset of `compat`). Errors when the
/// label sets differ or `compat` relates different systems.
pub fn greatest_simulation(
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
    compat: Option<&Relation>,
) -> Result<Option<Relation>> {
    let matrix = simulation_matrix(left, right, compat)?;
    let li = SysIndex::new(left);
    let ri = SysIndex::new(right);
    if !matrix[li.initial * ri.state_count() + ri.initial] {
        return Ok(None);
    }
    Ok(Some(relation_from_matrix(left, right, &li, &ri, &matrix)))
}

/// The simulation greatest fixpoint as a flat `n_left * n_right` matrix,
/// without the initial-pair test. Shared by `greatest_simulation` and the
/// synthesis diagnostics.
pub(crate) fn simulation_matrix(
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
    compat: Option<&Relation>,
) -> Result<Vec<bool>> {
    if left.labels() != right.labels() {
        return Err(Error::LabelSetMismatch {
            left: left.name().to_owned(),
            right: right.name().to_owned(),
        });
    }
    if let Some(rel) = compat {
        if **rel.left() != **left || **rel.right() != **right {
            return Err(Error::RelationSystemMismatch {
                expected_left: left.name().to_owned(),
                expected_right: right.name().to_owned(),
                found_left: rel.left().name().to_owned(),
                found_right: rel.right().name().to_owned(),
            });
        }
    }
    let li = SysIndex::new(left);
    let ri = SysIndex::new(right);
    let (n1, n2) = (li.state_count(), ri.state_count());

    let mut r = vec![true; n1 * n2];
    if let Some(rel) = compat {
        r = vec![false; n1 * n2];
        for (a, b) in rel.pairs() {
            let i = li.state_pos(a).expect("relation pair is a left state");
            let j = ri.state_pos(b).expect("relation pair is a right state");
            r[i * n2 + j] = true;
        }
    }

    // Left transitions, flattened; trans_into[q1] lists the indices of
    // transitions with target q1.
    let mut t1s: Vec<(usize, usize, usize)> = Vec::new();
    let mut trans_into: Vec<Vec<usize>> = vec![Vec::new(); n1];
    for p1 in 0..n1 {
        for &(label, q1) in &li.out[p1] {
            trans_into[q1].push(t1s.len());
            t1s.push((p1, label, q1));
        }
    }

    // remaining[t * n2 + p2]: matching right successors still related.
    let mut remaining: Vec<u32> = vec![0; t1s.len() * n2];
    for (t, &(_, label, q1)) in t1s.iter().enumerate() {
        for p2 in 0..n2 {
            let count = ri
                .out_with_label(p2, label)
                .iter()
                .filter(|&&(_, q2)| r[q1 * n2 + q2])
                .count();
            remaining[t * n2 + p2] = count as u32;
        }
    }

    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for (t, &(p1, _, _)) in t1s.iter().enumerate() {
        for p2 in 0..n2 {
            if remaining[t * n2 + p2] == 0 && r[p1 * n2 + p2] {
                r[p1 * n2 + p2] = false;
                queue.push_back((p1, p2));
            }
        }
    }

    while let Some((q1, q2)) = queue.pop_front() {
        for &t in &trans_into[q1] {
            let (p1, label, _) = t1s[t];
            for &(_, p2) in ri.inc_with_label(q2, label) {
                let cell = t * n2 + p2;
                remaining[cell] -= 1;
                if remaining[cell] == 0 && r[p1 * n2 + p2] {
                    r[p1 * n2 + p2] = false;
                    queue.push_back((p1, p2));
                }
            }
        }
    }
    Ok(r)
}

pub(crate) fn relation_from_matrix(
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
    li: &SysIndex<'_>,
    ri: &SysIndex<'_>,
    matrix: &[bool],
) -> Relation {
    let n2 = ri.state_count();
    let mut pairs = BTreeSet::new();
    for i in 0..li.state_count() {
        for j in 0..n2 {
            if matrix[i * n2 + j] {
                pairs.insert((li.states[i].clone(), ri.states[j].clone()));
            }
        }
    }
    Relation {
        left: Arc::clone(left),
        right: Arc::clone(right),
        pairs,
    }
}

/// The largest bisimulation relation between `left` and `right` containing
/// the pair of initial states, or `None` when the initial states are not
/// bisimilar. Never returns an empty relation.
///
/// Errors when the label sets differ.
pub fn greatest_bisimulation(
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
) -> Result<Option<Relation>> {
    if left.labels() != right.labels() {
        return Err(Error::LabelSetMismatch {
            left: left.name().to_owned(),
            right: right.name().to_owned(),
        });
    }
    let li = SysIndex::new(left);
    let ri = SysIndex::new(right);
    let (lb, rb) = bisimilarity_partition(&li, &ri);
    if lb[li.initial] != rb[ri.initial] {
        return Ok(None);
    }
    let mut members: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &b) in lb.iter().enumerate() {
        members.entry(b).or_default().0.push(i);
    }
    for (j, &b) in rb.iter().enumerate() {
        members.entry(b).or_default().1.push(j);
    }
    let mut pairs = BTreeSet::new();
    for (lefts, rights) in members.values() {
        for &i in lefts {
            for &j in rights {
                pairs.insert((li.states[i].clone(), ri.states[j].clone()));
            }
        }
    }
    Ok(Some(Relation {
        left: Arc::clone(left),
        right: Arc::clone(right),
        pairs,
    }))
}

/// The largest bisimulation between `left` and `right` that is a subset of
/// the `compat` predicate and contains the initial pair, or `None`.
///
/// Bisimilarity blocks prune the candidate set first (any bisimulation
/// inside `compat` only relates bisimilar states), so `compat` is only
/// evaluated on pairs of bisimilar states; then a pair-removal fixpoint
/// enforces both transfer directions. Requires equal label sets.
pub(crate) fn greatest_bisimulation_within<F>(
    left: &Arc<TransitionSystem>,
    right: &Arc<TransitionSystem>,
    compat: F,
) -> Option<Relation>
where
    F: Fn(&StateId, &StateId) -> bool,
{
    debug_assert_eq!(left.labels(), right.labels());
    let li = SysIndex::new(left);
    let ri = SysIndex::new(right);
    let (n1, n2) = (li.state_count(), ri.state_count());
    let (lb, rb) = bisimilarity_partition(&li, &ri);

    let mut members: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, &b) in lb.iter().enumerate() {
        members.entry(b).or_default().0.push(i);
    }
    for (j, &b) in rb.iter().enumerate() {
        members.entry(b).or_default().1.push(j);
    }
    let mut r = vec![false; n1 * n2];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for (lefts, rights) in members.values() {
        for &i in lefts {
            for &j in rights {
                if compat(li.states[i], ri.states[j]) {
                    r[i * n2 + j] = true;
                    queue.push_back((i, j));
                }
            }
        }
    }

    let pair_ok = |x: usize, y: usize, r: &[bool]| -> bool {
        let forward = li.out[x].iter().all(|&(label, x2)| {
            ri.out_with_label(y, label)
                .iter()
                .any(|&(_, y2)| r[x2 * n2 + y2])
        });
        forward
            && ri.out[y].iter().all(|&(label, y2)| {
                li.out_with_label(x, label)
                    .iter()
                    .any(|&(_, x2)| r[x2 * n2 + y2])
            })
    };

    while let Some((x, y)) = queue.pop_front() {
        if !r[x * n2 + y] || pair_ok(x, y, &r) {
            continue;
        }
        r[x * n2 + y] = false;
        // Re-examine pairs that could have relied on (x, y).
        for &(label, px) in &li.inc[x] {
            for &(_, py) in ri.inc_with_label(y, label) {
                if r[px * n2 + py] {
                    queue.push_back((px, py));
                }
            }
        }
    }

    if !r[li.initial * n2 + ri.initial] {
        return None;
    }
    Some(relation_from_matrix(left, right, &li, &ri, &r))
}

/// Two morphisms out of a common apex system; the morphism-level view of a
/// relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    left_leg: Morphism,
    right_leg: Morphism,
}

impl Span {
    /// Requires both legs to start at the same apex and be valid morphisms.
    pub fn new(left_leg: Morphism, right_leg: Morphism) -> Result<Self> {
        if **left_leg.source() != **right_leg.source() {
            return Err(Error::SourceMismatch {
                left: left_leg.source().name().to_owned(),
                right: right_leg.source().name().to_owned(),
            });
        }
        for leg in [&left_leg, &right_leg] {
            let report = leg.check();
            if !report.is_empty() {
                return Err(Error::InvalidMorphism {
                    from: leg.source().name().to_owned(),
                    to: leg.target().name().to_owned(),
                    detail: report.violations()[0].to_string(),
                });
            }
        }
        Ok(Span {
            left_leg,
            right_leg,
        })
    }

    /// Builds the span of a relation: the apex has one state per pair, the
    /// synchronized transitions that stay inside the relation, and the two
    /// projections as legs.
    ///
    /// Requires equal label sets and the initial pair in the relation (which
    /// makes the relation nonempty and the apex a well-formed system).
    pub fn from_relation(relation: &Relation) -> Result<Self> {
        relation.require_same_labels()?;
        let left = relation.left();
        let right = relation.right();
        let initial = (left.initial().clone(), right.initial().clone());
        if !relation.pairs().contains(&initial) {
            return Err(Error::InitialPairMissing {
                left: initial.0,
                right: initial.1,
            });
        }
        let names = render_pairs(relation.pairs());
        let mut transitions = BTreeSet::new();
        for (p1, p2) in relation.pairs() {
            for (label, targets) in left.transitions_from(p1) {
                for q1 in targets {
                    for q2 in right.successors(p2, label) {
                        if let Some(target_name) = names.get(&(q1.clone(), q2.clone())) {
                            transitions.insert(Transition {
                                source: names[&(p1.clone(), p2.clone())].clone(),
                                label: label.clone(),
                                target: target_name.clone(),
                            });
                        }
                    }
                }
            }
        }
        let apex = Arc::new(TransitionSystem::new(
            format!("{}~{}", left.name(), right.name()),
            left.labels().iter().cloned(),
            names.values().cloned(),
            names[&initial].clone(),
            transitions,
        ));
        let left_map = relation
            .pairs()
            .iter()
            .map(|pair| (names[pair].clone(), pair.0.clone()))
            .collect();
        let right_map = relation
            .pairs()
            .iter()
            .map(|pair| (names[pair].clone(), pair.1.clone()))
            .collect();
        let left_leg =
            Morphism::new_label_preserving(Arc::clone(&apex), Arc::clone(left), left_map)?;
        let right_leg =
            Morphism::new_label_preserving(Arc::clone(&apex), Arc::clone(right), right_map)?;
        debug_assert!(left_leg.check().is_empty() && right_leg.check().is_empty());
        Ok(Span {
            left_leg,
            right_leg,
        })
    }

    pub fn apex(&self) -> &Arc<TransitionSystem> {
        self.left_leg.source()
    }

    pub fn left_leg(&self) -> &Morphism {
        &self.left_leg
    }

    pub fn right_leg(&self) -> &Morphism {
        &self.right_leg
    }

    /// The relation induced by the legs: one pair of leg images per apex
    /// state.
    pub fn to_relation(&self) -> Relation {
        let pairs = self
            .apex()
            .states()
            .iter()
            .map(|z| {
                (
                    self.left_leg.state_image(z).expect("total state map").clone(),
                    self.right_leg.state_image(z).expect("total state map").clone(),
                )
            })
            .collect();
        Relation {
            left: Arc::clone(self.left_leg.target()),
            right: Arc::clone(self.right_leg.target()),
            pairs,
        }
    }
}
