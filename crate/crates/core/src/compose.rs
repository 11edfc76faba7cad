//! Synchronous composition as a pullback: given two label-preserving
//! morphisms `f: T1 -> A` and `g: T2 -> A` into a shared mediator, the
//! product runs `T1` and `T2` in lockstep on the pairs of states whose images
//! in `A` agree.
//!
//! Plain parallel composition is the special case where the mediator is the
//! one-state system that permits every label at all times
//! ([`CanonicalMediator`]); then every state pair is compatible and the
//! product synchronizes on labels alone.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morphism::Morphism;
use crate::naming::render_pairs;
use crate::ts::{Label, StateId, Transition, TransitionSystem};

/// The product system of a pullback together with its three structure maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackResult {
    product: Arc<TransitionSystem>,
    proj_left: Morphism,
    proj_right: Morphism,
    to_mediator: Morphism,
}

impl PullbackResult {
    pub fn product(&self) -> &Arc<TransitionSystem> {
        &self.product
    }

    /// Projection onto the left factor.
    pub fn proj_left(&self) -> &Morphism {
        &self.proj_left
    }

    /// Projection onto the right factor.
    pub fn proj_right(&self) -> &Morphism {
        &self.proj_right
    }

    /// The mediating morphism into the shared target.
    pub fn to_mediator(&self) -> &Morphism {
        &self.to_mediator
    }

    /// True when both squares commute: projecting and then mapping into the
    /// mediator agrees with [`PullbackResult::to_mediator`]. Holds by
    /// construction for every pullback of valid morphisms.
    pub fn commutes(&self, f: &Morphism, g: &Morphism) -> bool {
        let left_ok = self
            .proj_left
            .then(f)
            .map(|m| m == self.to_mediator)
            .unwrap_or(false);
        let right_ok = self
            .proj_right
            .then(g)
            .map(|m| m == self.to_mediator)
            .unwrap_or(false);
        left_ok && right_ok
    }
}

/// The pullback of `f: T1 -> A` and `g: T2 -> A`.
///
/// States are the pairs `(q1, q2)` with `f(q1) = g(q2)`; transitions pair up
/// equally labeled steps between such states (their mediator images then
/// agree automatically). Requires two valid label-preserving morphisms with
/// the same target.
pub fn pullback(f: &Morphism, g: &Morphism) -> Result<PullbackResult> {
    if **f.target() != **g.target() {
        return Err(Error::TargetMismatch {
            left: f.target().name().to_owned(),
            right: g.target().name().to_owned(),
        });
    }
    f.require_tran_l()?;
    g.require_tran_l()?;
    debug_assert!(f.is_valid() && g.is_valid(), "pullback of invalid morphisms");

    let t1 = f.source();
    let t2 = g.source();
    let mut pairs: BTreeSet<(StateId, StateId)> = BTreeSet::new();
    for q1 in t1.states() {
        let image = &f.state_map()[q1];
        for q2 in t2.states() {
            if g.state_map()[q2] == *image {
                pairs.insert((q1.clone(), q2.clone()));
            }
        }
    }
    let names = render_pairs(&pairs);

    // Right transitions bucketed by (label, mediator image of source,
    // mediator image of target); each left transition then joins exactly the
    // compatible bucket.
    let mut buckets: HashMap<(&Label, &StateId, &StateId), Vec<&Transition>> = HashMap::new();
    for t in t2.transitions() {
        let key = (&t.label, &g.state_map()[&t.source], &g.state_map()[&t.target]);
        buckets.entry(key).or_default().push(t);
    }
    let mut transitions: BTreeSet<Transition> = BTreeSet::new();
    for t in t1.transitions() {
        let key = (&t.label, &f.state_map()[&t.source], &f.state_map()[&t.target]);
        let Some(matching) = buckets.get(&key) else {
            continue;
        };
        for m in matching {
            transitions.insert(Transition {
                source: names[&(t.source.clone(), m.source.clone())].clone(),
                label: t.label.clone(),
                target: names[&(t.target.clone(), m.target.clone())].clone(),
            });
        }
    }

    let initial_pair = (t1.initial().clone(), t2.initial().clone());
    // Valid morphisms preserve initial states, so the initial pair is
    // compatible; without validity (skipped checks) the product may fail
    // validation, which is reported downstream rather than hidden here.
    let initial = names
        .get(&initial_pair)
        .cloned()
        .unwrap_or_else(|| StateId::new(format!("({},{})", initial_pair.0, initial_pair.1)));
    let product = Arc::new(TransitionSystem::new(
        format!("{}||{}", t1.name(), t2.name()),
        t1.labels().iter().cloned(),
        names.values().cloned(),
        initial,
        transitions,
    ));

    let left_map = pairs
        .iter()
        .map(|pair| (names[pair].clone(), pair.0.clone()))
        .collect();
    let right_map = pairs
        .iter()
        .map(|pair| (names[pair].clone(), pair.1.clone()))
        .collect();
    let mediator_map = pairs
        .iter()
        .map(|pair| (names[pair].clone(), f.state_map()[&pair.0].clone()))
        .collect();
    let proj_left = Morphism::new_label_preserving(Arc::clone(&product), Arc::clone(t1), left_map)?;
    let proj_right =
        Morphism::new_label_preserving(Arc::clone(&product), Arc::clone(t2), right_map)?;
    let to_mediator =
        Morphism::new_label_preserving(Arc::clone(&product), Arc::clone(f.target()), mediator_map)?;
    let result = PullbackResult {
        product,
        proj_left,
        proj_right,
        to_mediator,
    };
    debug_assert!(result.commutes(f, g));
    Ok(result)
}

/// The one-state mediator over a label set: a single state with a self-loop
/// for every label. Every system over the same label set has exactly one
/// morphism into it.
#[derive(Clone, Debug)]
pub struct CanonicalMediator {
    system: Arc<TransitionSystem>,
}

impl CanonicalMediator {
    /// Requires a nonempty label set (a system over no labels is not
    /// well-formed).
    pub fn new(labels: &BTreeSet<Label>) -> Self {
        debug_assert!(!labels.is_empty());
        let star = StateId::new("*");
        let system = Arc::new(TransitionSystem::new(
            "mediator",
            labels.iter().cloned(),
            [star.clone()],
            star.clone(),
            labels.iter().map(|l| Transition {
                source: star.clone(),
                label: l.clone(),
                target: star.clone(),
            }),
        ));
        CanonicalMediator { system }
    }

    pub fn system(&self) -> &Arc<TransitionSystem> {
        &self.system
    }

    /// The unique label-preserving morphism from `ts` into the mediator.
    /// Errors when the label sets differ.
    pub fn morphism_from(&self, ts: &Arc<TransitionSystem>) -> Result<Morphism> {
        let star = self.system.initial().clone();
        let state_map = ts.states().iter().map(|s| (s.clone(), star.clone())).collect();
        Morphism::new_label_preserving(Arc::clone(ts), Arc::clone(&self.system), state_map)
    }
}

/// Parallel composition: the pullback over the canonical one-state mediator,
/// synchronizing on labels alone. Requires equal label sets.
pub fn parallel(left: &Arc<TransitionSystem>, right: &Arc<TransitionSystem>) -> Result<PullbackResult> {
    if left.labels() != right.labels() {
        return Err(Error::LabelSetMismatch {
            left: left.name().to_owned(),
            right: right.name().to_owned(),
        });
    }
    let mediator = CanonicalMediator::new(left.labels());
    let f = mediator.morphism_from(left)?;
    let g = mediator.morphism_from(right)?;
    pullback(&f, &g)
}
