use crate::scalar::Scalar;
use crate::space::{SearchSpace, StateId};

/// Result of a greedy hill-climbing walk.
#[derive(Debug, Clone)]
pub struct Climb<S> {
    /// True when the walk arrived at the target.
    pub reached: bool,
    /// States visited in order, endpoints included; empty for the
    /// zero-move identity walk.
    pub path: Vec<StateId>,
    pub cost: S,
}

/// Greedy hill-climbing from `s1` toward `s2` under the base heuristic.
///
/// Each step moves to the neighbor minimizing edge cost plus heuristic,
/// ties toward the smaller id. The walk fails on a local minimum or
/// plateau — no neighbor has a strictly lower heuristic than the current
/// state — or when `bound` moves were spent. Never updates the heuristic.
pub fn hill_climb<S: Scalar>(
    space: &SearchSpace<S>,
    s1: StateId,
    s2: StateId,
    bound: usize,
) -> Climb<S> {
    if s1 == s2 {
        return Climb { reached: true, path: Vec::new(), cost: S::of(0.0) };
    }
    let mut path = vec![s1];
    let mut cost = S::of(0.0);
    let mut current = s1;
    for _ in 0..bound {
        let h_here = space.base_h(current, s2);
        let mut descent_exists = false;
        let mut best: Option<(S, StateId, S)> = None; // (edge + h, id, edge)
        for &(n, w) in space.neighbor_row(current) {
            let hn = space.base_h(n, s2);
            if hn < h_here {
                descent_exists = true;
            }
            let f = w + hn;
            // rows ascend by id, so a strict comparison keeps the smallest id
            if best.map_or(true, |(bf, _, _)| f < bf) {
                best = Some((f, n, w));
            }
        }
        if !descent_exists {
            return Climb { reached: false, path, cost };
        }
        let (_, next, w) = best.expect("descent implies at least one neighbor");
        path.push(next);
        cost = cost + w;
        current = next;
        if current == s2 {
            return Climb { reached: true, path, cost };
        }
    }
    Climb { reached: false, path, cost }
}

/// Whether `s2` can be hill-climbed to from `s1` within `bound` moves.
pub fn hc_reachable<S: Scalar>(
    space: &SearchSpace<S>,
    s1: StateId,
    s2: StateId,
    bound: usize,
) -> bool {
    hill_climb(space, s1, s2, bound).reached
}
