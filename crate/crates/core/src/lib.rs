//! Synchronous distributed-algorithm simulation with bandwidth accounting,
//! d-wise independent hash families, a conditional-expectations engine, and
//! the deterministic MIS / spanner algorithms built on top of them.
//!
//! Module map:
//!
//! * [`graph`]: weighted graphs, generators, shortest paths, MIS and spanner verifiers.
//! * [`sim`]: round-based execution with per-model bandwidth enforcement.
//! * [`hashfam`]: GF(2^m) polynomial hash families, biased coins, exact conditional counts.
//! * [`derand`]: method of conditional expectations over seed prefixes.
//! * [`mis`]: randomized and deterministic MIS variants plus coloring.
//! * [`spanner`]: randomized and deterministic (2k-1)-spanners.

pub mod derand;
pub mod graph;
pub mod hashfam;
pub mod mis;
pub mod num;
pub mod sim;
pub mod spanner;

pub use graph::{Graph, NodeId, NodeSet, SpannerEdges};
pub use sim::{CostModel, ModelKind, RunMetrics};
