//! Shared fixtures for unit tests: the reference synthesis example used
//! throughout the module tests (a nondeterministic specification, a
//! deterministic plant, and their closed loop).

use std::sync::Arc;

use crate::ts::{Label, StateId, Transition, TransitionSystem};

pub(crate) fn sys(
    name: &str,
    labels: &[&str],
    states: &[&str],
    init: &str,
    trans: &[(&str, &str, &str)],
) -> TransitionSystem {
    TransitionSystem::new(
        name,
        labels.iter().map(|l| Label::new(*l)),
        states.iter().map(|s| StateId::new(*s)),
        init,
        trans.iter().map(|(s, l, t)| Transition::new(*s, *l, *t)),
    )
}

pub(crate) fn arc_sys(
    name: &str,
    labels: &[&str],
    states: &[&str],
    init: &str,
    trans: &[(&str, &str, &str)],
) -> Arc<TransitionSystem> {
    Arc::new(sys(name, labels, states, init, trans))
}

/// The specification side of the reference example: after `a`, the branch
/// taken decides whether `b` or `c` follows.
pub(crate) fn spec_sys() -> TransitionSystem {
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

/// The plant side of the reference example: deterministic, with a `b` move
/// from the initial state that the specification never allows.
pub(crate) fn plant_sys() -> TransitionSystem {
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

/// The reachable part of the closed loop of the reference example; it is
/// isomorphic to the specification side.
pub(crate) fn closed_loop_sys() -> TransitionSystem {
    sys(
        "loop",
        &["a", "b", "c"],
        &["r0", "r1", "r2", "r3"],
        "r0",
        &[
            ("r0", "a", "r1"),
            ("r0", "a", "r2"),
            ("r1", "b", "r3"),
            ("r2", "c", "r3"),
        ],
    )
}
