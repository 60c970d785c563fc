//! Offline subgoal databases and the online solvers that consume them:
//! partition-based retargeting, nearest-record replay, and pure
//! hill-climbing between stored subgoals.

mod clique;
mod compress;
mod dlrta;
mod hcdps;
mod knn;

pub use clique::clique_abstraction;
pub use compress::compress_path;
pub(crate) use hcdps::grow_regions;
pub use dlrta::{build_dlrta_db, solve_dlrta, DlrtaDatabase};
pub use hcdps::{build_hcdps_db, solve_hcdps, HcdpsDatabase, HcdpsParams};
pub use knn::{build_knn_db, solve_knn, KnnDatabase, KnnRecord};
