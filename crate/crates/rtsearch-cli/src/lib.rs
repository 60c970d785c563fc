//! Experiment orchestration around the `rtsearch` library: corpus
//! management, problem generation, benchmark runs, profiling, correlation,
//! prediction, and CSV report emission.

pub mod config;
pub mod corpus;
pub mod dbfile;
pub mod experiment;
pub mod report;
