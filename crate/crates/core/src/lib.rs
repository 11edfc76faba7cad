//! Finite labeled transition systems with a morphism-centric toolkit:
//! simulation and bisimulation relations, synchronous composition as a
//! pullback over a shared mediator, and controller synthesis deciding
//! bisimulation-equivalence control.
//!
//! The crate is organized around five layers:
//!
//! - [`ts`]: systems, runs, validation ([`TransitionSystem`], [`Run`]).
//! - [`morphism`]: structure-preserving maps, the open-map (step-lifting)
//!   check, and bounded path-faithfulness ([`Morphism`]).
//! - [`relation`]: simulation/bisimulation relations, their greatest
//!   fixpoints, and the span view of a relation ([`Relation`], [`Span`]).
//! - [`compose`]: pullbacks and parallel composition over the one-state
//!   mediator ([`pullback`], [`parallel`], [`CanonicalMediator`]).
//! - [`synthesis`]: existence check, synthesis, and independent verification
//!   of controllers ([`SynthesisProblem`]).
//!
//! [`format`] adds a line-oriented text format for systems, morphisms, and
//! relations with canonical (byte-deterministic) serialization.

pub mod compose;
mod error;
pub mod format;
mod index;
pub mod morphism;
mod naming;
mod refine;
pub mod relation;
pub mod synthesis;
pub mod ts;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use format::{
    detect_kind, parse_morphism, parse_relation, parse_system, parse_system_lenient,
    serialize_morphism, serialize_relation, serialize_system, DocumentKind, ParseError,
};
pub use morphism::{Morphism, MorphismReport, MorphismViolation};
pub use relation::{greatest_bisimulation, greatest_simulation, Relation, Span};
pub use synthesis::{SynthesisProblem, SynthesisResult, VerificationReport};
pub use ts::{Label, Run, StateId, Transition, TransitionSystem, ValidationReport, Violation};

pub use compose::{parallel, pullback, CanonicalMediator, PullbackResult};
