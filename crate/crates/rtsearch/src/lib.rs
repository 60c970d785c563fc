//! Real-time heuristic search on explicit graphs, the structural measures
//! that make such spaces easy or hard, and the statistics tying the two
//! together.
//!
//! The crate is organized along the pipeline:
//! grid/road/maze ingestion ([`ingest`]) → search spaces ([`SearchSpace`]) →
//! solvers ([`realtime`], [`subgoal`]) → complexity measures ([`complexity`])
//! → rank correlation and prediction ([`stats`], [`predict`]).

pub mod complexity;
mod error;
mod heuristic;
pub mod ingest;
pub mod predict;
pub mod realtime;
mod scalar;
mod seeds;
mod solution;
mod space;
pub mod stats;
pub mod subgoal;

pub use error::{Error, Result};
pub use heuristic::{effective_h, HeuristicOverlay};
pub use scalar::Scalar;
pub use seeds::derive_seed;
pub use solution::{suboptimality, Outcome, Solution};
pub use space::{HeuristicKind, Problem, SearchSpace, StateId};

/// Cost scalar the CLI and all experiments run with.
pub type Cost = f64;
