//! Database-free search: a full A*/Dijkstra oracle pair plus the real-time
//! movers — learning real-time search, greedy hill-climbing, and
//! time-bounded A*.

mod astar;
mod hillclimb;
mod lrta;
mod tba;

pub use astar::{astar, dijkstra_from, AStarStats};
pub(crate) use astar::dijkstra_tree;
pub use hillclimb::{hc_reachable, hill_climb, Climb};
pub use lrta::{default_step_cap, lrta_star, lrta_star_with_overlay, LssConfig};
pub(crate) use lrta::lrta_step;
pub use tba::{tba_star, TbaConfig};
