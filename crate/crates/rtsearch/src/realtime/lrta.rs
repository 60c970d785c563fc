use std::collections::{BinaryHeap, HashMap, VecDeque};

use ordered_float::OrderedFloat;

use crate::heuristic::HeuristicOverlay;
use crate::scalar::Scalar;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

/// Lookahead and move budget for the learning real-time agent.
#[derive(Debug, Clone, Copy)]
pub struct LssConfig {
    /// Local-search-space depth d, in moves from the current state.
    pub lookahead: usize,
    /// Global move budget before the run is abandoned.
    pub step_cap: usize,
}

impl LssConfig {
    pub fn new(lookahead: usize, step_cap: usize) -> Self {
        assert!(lookahead >= 1, "lookahead must be at least 1");
        assert!(step_cap >= 1, "step cap must be at least 1");
        LssConfig { lookahead, step_cap }
    }

    /// The conventional budget of 100 moves per state in the space.
    pub fn for_space<S: Scalar>(lookahead: usize, space: &SearchSpace<S>) -> Self {
        LssConfig::new(lookahead, default_step_cap(space))
    }
}

pub fn default_step_cap<S: Scalar>(space: &SearchSpace<S>) -> usize {
    100 * space.num_states().max(1)
}

/// One agent move chosen by a local search around the current state.
pub(crate) struct LssStep<S> {
    pub to: StateId,
    pub edge: S,
    pub expanded: u64,
}

/// Expand the local search space around `current`, update h(current) to the
/// best frontier f-value (never lowering it), and return the first move of
/// the cheapest route to that frontier state. None means the component is
/// exhausted and the overlay's goal is unreachable.
///
/// The frontier is the LSS border: states exactly `lookahead` moves out,
/// plus the goal itself if it falls inside (the goal is never expanded, so
/// it stays eligible as a target).
///
/// Only the current state's value is ever raised. With unit lookahead that
/// makes the agent provably reach any reachable goal; with deeper
/// lookaheads a heuristic depression can pull the agent into a two-state
/// shuffle that never learns (the low-valued state sits on one state's
/// frontier but inside the other's interior), so such runs can end at the
/// step cap.
pub(crate) fn lrta_step<S: Scalar>(
    space: &SearchSpace<S>,
    overlay: &mut HeuristicOverlay<S>,
    current: StateId,
    lookahead: usize,
) -> Option<LssStep<S>> {
    let goal = overlay.goal();
    if lookahead == 1 {
        // Hot path: the frontier is exactly the neighbor row, g = edge cost.
        // Rows ascend by id, so keeping strict improvements picks the
        // smallest id among ties.
        let mut best: Option<(S, StateId, S)> = None;
        for &(n, w) in space.neighbor_row(current) {
            let f = w + overlay.h(space, n);
            if best.map_or(true, |(bf, _, _)| f < bf) {
                best = Some((f, n, w));
            }
        }
        let (f, to, edge) = best?;
        overlay.raise(space, current, f);
        return Some(LssStep { to, edge, expanded: 1 });
    }

    // Hop-bounded breadth-first sweep fixes LSS membership: interior states
    // (hop < lookahead, never the goal) get expanded, border states are the
    // frontier.
    let mut hop: HashMap<StateId, usize> = HashMap::new();
    hop.insert(current, 0);
    let mut queue = VecDeque::from([current]);
    while let Some(s) = queue.pop_front() {
        let d = hop[&s];
        if d == lookahead || (s == goal && s != current) {
            continue;
        }
        for &(n, _) in space.neighbor_row(s) {
            if !hop.contains_key(&n) {
                hop.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }

    // Cheapest-cost pass inside the LSS, expanding interior states only.
    let mut g: HashMap<StateId, S> = HashMap::new();
    let mut parent: HashMap<StateId, StateId> = HashMap::new();
    let mut done: HashMap<StateId, bool> = HashMap::new();
    let mut heap: BinaryHeap<std::cmp::Reverse<(OrderedFloat<S>, StateId)>> = BinaryHeap::new();
    let mut expanded = 0u64;
    g.insert(current, S::of(0.0));
    heap.push(std::cmp::Reverse((OrderedFloat(S::of(0.0)), current)));
    let mut best: Option<(S, StateId)> = None;
    while let Some(std::cmp::Reverse((d, s))) = heap.pop() {
        if *done.get(&s).unwrap_or(&false) || OrderedFloat(g[&s]) != d {
            continue;
        }
        done.insert(s, true);
        let interior = hop[&s] < lookahead && !(s == goal && s != current);
        if !interior {
            // Frontier candidate; rank by g + h, ties toward smaller id.
            let f = d.0 + overlay.h(space, s);
            let better = match best {
                None => true,
                Some((bf, bid)) => f < bf || (f == bf && s < bid),
            };
            if better {
                best = Some((f, s));
            }
            continue;
        }
        expanded += 1;
        for &(n, w) in space.neighbor_row(s) {
            if !hop.contains_key(&n) || *done.get(&n).unwrap_or(&false) {
                continue;
            }
            let nd = d.0 + w;
            if g.get(&n).map_or(true, |&old| nd < old) {
                g.insert(n, nd);
                parent.insert(n, s);
                heap.push(std::cmp::Reverse((OrderedFloat(nd), n)));
            }
        }
    }
    let (f, target) = best?;
    overlay.raise(space, current, f);
    // First edge of the cheapest route to the chosen frontier state.
    let mut step = target;
    while parent[&step] != current {
        step = parent[&step];
    }
    let edge = space.edge_cost(current, step).expect("parent links follow edges");
    Some(LssStep { to: step, edge, expanded })
}

/// Learning real-time search against a caller-owned heuristic overlay,
/// which must target the problem goal. Updates accumulate in the overlay,
/// so repeated runs keep learning.
pub fn lrta_star_with_overlay<S: Scalar>(
    space: &SearchSpace<S>,
    overlay: &mut HeuristicOverlay<S>,
    problem: Problem,
    cfg: LssConfig,
) -> Solution<S> {
    assert_eq!(
        overlay.goal(),
        problem.goal,
        "overlay targets a different goal than the problem"
    );
    let raises_before = overlay.strict_raises();
    let mut sol = Solution::start_at(problem.start);
    let mut current = problem.start;
    let mut moves = 0;
    while current != problem.goal {
        if moves == cfg.step_cap {
            sol.heuristic_updates = overlay.strict_raises() - raises_before;
            sol.finish(Outcome::StepCapExceeded);
            return sol;
        }
        match lrta_step(space, overlay, current, cfg.lookahead) {
            Some(step) => {
                sol.expansions += step.expanded;
                sol.record_move(step.to, step.edge);
                current = step.to;
                moves += 1;
            }
            None => {
                sol.heuristic_updates = overlay.strict_raises() - raises_before;
                sol.finish(Outcome::Unreachable);
                return sol;
            }
        }
    }
    sol.heuristic_updates = overlay.strict_raises() - raises_before;
    sol.finish(Outcome::Solved);
    sol
}

/// Learning real-time search with a fresh overlay per run.
pub fn lrta_star<S: Scalar>(
    space: &SearchSpace<S>,
    problem: Problem,
    cfg: LssConfig,
) -> Solution<S> {
    let mut overlay = HeuristicOverlay::new(problem.goal);
    lrta_star_with_overlay(space, &mut overlay, problem, cfg)
}
