//! Decision engine and optimal-move planner for anonymous, oblivious,
//! fully synchronous robots on finite graphs.
//!
//! The pipeline is: enumerate every placement of `k` robots on a graph up to
//! isomorphism ([`hypergraph::enumerate_configurations`]), group the
//! orbit-level moves of each placement by the set of placements an adversary
//! can force ([`hypergraph::build`]), compute which placements can be driven
//! into a final set ([`solver::solve`]) and how fast in the worst case
//! ([`solver::plan`]). [`simulator`] replays the resulting robot algorithm
//! against adversaries.

pub mod canonize;
pub mod error;
pub mod graph;
pub mod hypergraph;
pub mod moves;
pub mod problems;
pub mod simulator;
pub mod solver;

pub use canonize::{CanonicalForm, OrbitPartition};
pub use error::{Error, Result};
pub use graph::{Configuration, Graph, VertexColoring};
pub use hypergraph::{ConfigHypergraph, Hyperarc, Scheduler};
pub use moves::{Move, OutcomeSet};
pub use problems::ProblemSpec;
pub use simulator::{AdversaryStrategy, ExecutionTrace};
pub use solver::{MoveDecision, PlanEntry, SolvabilityResult};
