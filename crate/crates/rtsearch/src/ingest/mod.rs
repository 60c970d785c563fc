//! Search-space construction: grid-map and road-graph parsers, a maze
//! generator, and a fixed-size sub-space sampler.

mod dimacs;
mod maze;
mod movingai;
mod subspace;

pub use dimacs::{parse_dimacs, RoadGraph};
pub use maze::{generate_maze, MAZE_CORRIDOR_WIDTHS};
pub use movingai::GridMap;
pub use subspace::{sample_subspace, sample_subspace_members, SubspaceSpec};
