//! Labeled probabilistic transition systems (LPTS) with exact rational
//! probabilities, strong-simulation checking, stochastic-tree counterexamples
//! and compositional verification by assume-guarantee abstraction refinement.
//!
//! The crate is organized around a small set of immutable value types:
//!
//! * [`Rat`] — arbitrary-precision rationals; probabilities are never floats.
//! * [`Dist`] — probability distributions over states, canonically ordered.
//! * [`Lpts`] — a transition system `⟨S, s0, α, τ⟩` with `τ ⊆ S × α × Dist(S)`.
//! * [`StochasticTree`] — a tree-shaped LPTS together with an execution
//!   mapping into the system it was extracted from.
//!
//! On top of these, the crate provides:
//!
//! * [`simulate`] — decides `L1 ⪯ L2` (strong simulation) by reducing each
//!   distribution comparison to an exact maximum-flow problem, and produces a
//!   removal trace from which counterexamples can be reconstructed;
//! * [`cex`] — builds stochastic-tree counterexamples witnessing `L1 ⋠ L2`;
//! * [`compose`] — parallel composition with provenance, alphabet widening
//!   and projection of counterexample trees onto components;
//! * [`refine`] — quotient abstractions, counterexample-guided partition
//!   refinement and a monolithic CEGAR loop;
//! * [`agar`] — assume-guarantee abstraction refinement for two components
//!   and for chains of `n` components;
//! * [`parse`] / [`emit`] — a small textual modeling language and JSON/DOT
//!   serializers for counterexamples and run logs.

pub mod agar;
pub mod cex;
pub mod compose;
pub mod emit;
pub mod flow;
pub mod gen;
pub mod model;
pub mod parse;
pub mod partition;
pub mod rational;
pub mod refine;
pub mod relation;
pub mod simulate;
pub mod tree;

pub use agar::{agar2, agar_n, lift_tree, AgarError, AgarLogRecord, AgarOutcome, AgarVerdict};
pub use cex::{build_cex, CexError};
pub use compose::{compose, product_dist, project, widen_alphabet, ComposeError, ComposedLpts, Provenance, ProvenanceCase, Side};
pub use emit::{emit_cex, parse_cex_json, CexDocument, CexFormat, CexMeta};
pub use model::{classify, complete_spec, ActionId, ActionTable, CompleteSpecError, Dist, DistError, Lpts, LptsKind, RawLpts, RawTransition, RetableError, StateId, Transition, Violation};
pub use parse::{parse_model, pretty_print, ModelFile, ParseError};
pub use partition::Partition;
pub use rational::{parse_rat, rat, rat_to_string, Rat};
pub use refine::{analyze_and_refine, cegar, quotient, CegarOutcome, CegarVerdict, RefineError, RefinementOutcome, SplitRecord};
pub use relation::PairSet;
pub use simulate::{check_simulation, coarsest_simulation, dist_leq, holds, tree_simulation, witness_subset, Challenge, DistLeq, RemovalRecord, ScanMode, SimCheck, SimError, TreeSimIteration, TreeSimLog, WeightFn};
pub use tree::{check_exec_map, StochasticTree, TreeBuilder};

#[cfg(test)]
mod send_sync {
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_values_are_shareable() {
        assert_send_sync::<crate::model::Lpts>();
        assert_send_sync::<crate::model::Dist>();
        assert_send_sync::<crate::tree::StochasticTree>();
        assert_send_sync::<crate::compose::ComposedLpts>();
        assert_send_sync::<crate::partition::Partition>();
        assert_send_sync::<crate::relation::PairSet>();
    }
}
