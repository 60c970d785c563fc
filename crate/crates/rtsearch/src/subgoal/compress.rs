use crate::error::{Error, Result};
use crate::realtime::hc_reachable;
use crate::scalar::Scalar;
use crate::space::{SearchSpace, StateId};

/// Compress a walkable path into the shortest chain of subgoals such that
/// each is hill-climbable from its predecessor within `bound` moves.
///
/// Greedy farthest-reachable: from the current anchor (initially the path
/// start), find the farthest path state still reachable, emit it, and
/// anchor there; the final chain element is always the path end. The
/// chain never includes the path start. The probe gallops ahead and then
/// bisects, treating reachability along the path as monotone.
pub fn compress_path<S: Scalar>(
    space: &SearchSpace<S>,
    path: &[StateId],
    bound: usize,
) -> Result<Vec<StateId>> {
    assert!(bound >= 1, "compression bound must be at least 1");
    if path.len() < 2 {
        return Ok(path.last().map(|&s| vec![s]).unwrap_or_default());
    }
    let mut chain = Vec::new();
    let mut anchor = 0usize;
    let last = path.len() - 1;
    while anchor < last {
        let next = farthest_reachable(space, path, anchor, bound)?;
        chain.push(path[next]);
        anchor = next;
    }
    Ok(chain)
}

/// Largest probe index reachable from `path[anchor]`, assuming a monotone
/// reachable-then-unreachable shape past the anchor.
fn farthest_reachable<S: Scalar>(
    space: &SearchSpace<S>,
    path: &[StateId],
    anchor: usize,
    bound: usize,
) -> Result<usize> {
    let from = path[anchor];
    let last = path.len() - 1;
    // common easy case: the rest of the path in one hop
    if hc_reachable(space, from, path[last], bound) {
        return Ok(last);
    }
    if !hc_reachable(space, from, path[anchor + 1], bound) {
        // possible on weighted graphs where the greedy walk veers off and
        // stalls; such a path cannot be represented as a chain
        return Err(Error::Build(format!(
            "path compression stalled: state {} cannot hill-climb to its successor {}",
            from, path[anchor + 1]
        )));
    }
    // gallop to the first failing probe, then bisect the boundary
    let mut lo = anchor + 1; // known reachable
    let mut step = 1usize;
    let mut hi = last; // known unreachable (checked above)
    while lo + step < hi {
        let probe = lo + step;
        if hc_reachable(space, from, path[probe], bound) {
            lo = probe;
            step *= 2;
        } else {
            hi = probe;
            break;
        }
    }
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if hc_reachable(space, from, path[mid], bound) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::GridMap;
    use crate::realtime::astar;
    use crate::space::Problem;

    fn grid(text: &str) -> (SearchSpace<f64>, GridMap) {
        let lines: Vec<&str> = text.trim().lines().map(str::trim).collect();
        let (w, h) = (lines[0].len(), lines.len());
        let open = lines.concat().chars().map(|c| c == '.').collect();
        let g = GridMap::from_cells(w, h, open).unwrap();
        let sp = g.to_space();
        (sp, g)
    }

    #[test]
    fn open_grid_path_compresses_to_goal_alone() {
        let (sp, _) = grid("......\n......\n......\n......");
        let (sol, _) = astar(&sp, Problem::new(StateId(0), StateId(23)).unwrap());
        let chain = compress_path(&sp, &sol.path, 250).unwrap();
        assert_eq!(chain, vec![StateId(23)]);
    }

    #[test]
    fn single_edge_path() {
        let (sp, _) = grid("..");
        let chain = compress_path(&sp, &[StateId(0), StateId(1)], 250).unwrap();
        assert_eq!(chain, vec![StateId(1)]);
    }

    #[test]
    fn trap_crossing_needs_an_intermediate_subgoal() {
        let (sp, g) = grid(
            ".....\n\
             .@@..\n\
             ..@..\n\
             .@@..\n\
             .....",
        );
        let start = g.state_at(0, 2).unwrap();
        let goal = g.state_at(4, 2).unwrap();
        let (sol, _) = astar(&sp, Problem::new(start, goal).unwrap());
        let chain = compress_path(&sp, &sol.path, 250).unwrap();
        assert!(chain.len() >= 2, "got {chain:?}");
        assert_eq!(*chain.last().unwrap(), goal);
        // every link is certified hill-climbable
        let mut from = start;
        for &c in &chain {
            assert!(hc_reachable(&sp, from, c, 250));
            from = c;
        }
    }

    #[test]
    fn tight_bound_forces_short_hops() {
        let (sp, _) = grid("........");
        let path: Vec<StateId> = (0..8).map(StateId).collect();
        let chain = compress_path(&sp, &path, 2).unwrap();
        // max two moves per link along a corridor
        assert_eq!(chain, vec![StateId(2), StateId(4), StateId(6), StateId(7)]);
    }

    #[test]
    fn trivial_paths() {
        let (sp, _) = grid("...");
        assert!(compress_path(&sp, &[], 5).unwrap().is_empty());
        assert_eq!(compress_path(&sp, &[StateId(1)], 5).unwrap(), vec![StateId(1)]);
    }
}
