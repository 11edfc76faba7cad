use thiserror::Error;

use crate::ts::{Label, StateId};

/// Errors raised by constructors and operations on transition systems,
/// morphisms, relations, and synthesis problems.
///
/// Parse errors have their own type ([`crate::format::ParseError`]) because
/// they carry source locations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A label was used with a system whose label set does not contain it.
    #[error("label `{label}` is not in the label set of system `{system}`")]
    UnknownLabel { label: Label, system: String },

    /// A state was used with a system whose state set does not contain it.
    #[error("state `{state}` is not a state of system `{system}`")]
    UnknownState { state: StateId, system: String },

    /// A morphism state map is missing an entry for a source state.
    #[error("state map has no entry for source state `{state}`")]
    PartialStateMap { state: StateId },

    /// A morphism label map is missing an entry for a source label.
    #[error("label map has no entry for source label `{label}`")]
    PartialLabelMap { label: Label },

    /// Two systems that the operation requires to share a label set do not.
    #[error("label sets of `{left}` and `{right}` differ")]
    LabelSetMismatch { left: String, right: String },

    /// The operation is only defined for morphisms whose label map is the
    /// identity on a shared label set.
    #[error("morphism from `{from}` to `{to}` does not have the identity label map")]
    LabelMapNotIdentity { from: String, to: String },

    /// A morphism that the operation requires to be valid fails the morphism
    /// conditions.
    #[error("map from `{from}` to `{to}` is not a morphism: {detail}")]
    InvalidMorphism {
        from: String,
        to: String,
        detail: String,
    },

    /// A run fails the run conditions for the system it was used with.
    #[error("not a run of system `{system}`: {detail}")]
    InvalidRun { system: String, detail: String },

    /// Two morphisms that the operation requires to share a target do not.
    #[error("morphism targets `{left}` and `{right}` differ")]
    TargetMismatch { left: String, right: String },

    /// Two morphisms that the operation requires to share a source do not.
    #[error("morphism sources `{left}` and `{right}` differ")]
    SourceMismatch { left: String, right: String },

    /// Composition `f.then(g)` requires the target of `f` to equal the
    /// source of `g`.
    #[error("cannot compose: target `{first_target}` differs from source `{second_source}`")]
    ComposeMismatch {
        first_target: String,
        second_source: String,
    },

    /// A relation used where an initial-pair-containing relation is required
    /// (span construction) lacks the pair of initial states.
    #[error("relation does not contain the initial pair ({left}, {right})")]
    InitialPairMissing { left: StateId, right: StateId },

    /// A relation was supplied for a different pair of systems than the
    /// operation works on.
    #[error("relation is over (`{expected_left}`, `{expected_right}`), not (`{found_left}`, `{found_right}`)")]
    RelationSystemMismatch {
        expected_left: String,
        expected_right: String,
        found_left: String,
        found_right: String,
    },

    /// Synthesis requires a deterministic plant; faithfulness of the
    /// candidate controller map cannot be certified otherwise.
    #[error("FAITHFULNESS_UNVERIFIED: plant `{plant}` is nondeterministic")]
    FaithfulnessUnverified { plant: String },
}

pub type Result<T> = std::result::Result<T, Error>;
