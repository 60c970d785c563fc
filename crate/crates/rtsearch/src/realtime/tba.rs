use std::collections::HashMap;

use super::astar::{AStarMachine, MachineStatus};
use crate::scalar::Scalar;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

/// Planning budget per agent move for time-bounded search.
#[derive(Debug, Clone, Copy)]
pub struct TbaConfig {
    /// A* expansions performed between agent moves.
    pub expansions_per_move: usize,
    /// Agent ticks (moves and waits) before the run is abandoned.
    pub step_cap: usize,
}

impl TbaConfig {
    pub fn new(expansions_per_move: usize, step_cap: usize) -> Self {
        assert!(expansions_per_move >= 1, "expansion budget must be at least 1");
        assert!(step_cap >= 1, "step cap must be at least 1");
        TbaConfig { expansions_per_move, step_cap }
    }

    /// The conventional budget of 100 ticks per state in the space.
    pub fn for_space<S: Scalar>(expansions_per_move: usize, space: &SearchSpace<S>) -> Self {
        TbaConfig::new(expansions_per_move, 100 * space.num_states().max(1))
    }
}

/// Time-bounded A*: one persistent A* search from the start runs in
/// fixed-size slices, and between slices the agent takes one move toward
/// the most promising open state (or the goal, once its optimal path is
/// known).
///
/// The agent follows the predecessor-link route of the current target.
/// When the target changes and the agent is off the new route, it
/// backtracks along its own trail one move per tick until it rejoins;
/// standing at a non-goal target it waits for the planner. Every tick,
/// moving or waiting, counts against the step cap.
pub fn tba_star<S: Scalar>(
    space: &SearchSpace<S>,
    problem: Problem,
    cfg: TbaConfig,
) -> Solution<S> {
    let mut machine = AStarMachine::new(space, problem.start, problem.goal);
    let mut sol = Solution::start_at(problem.start);
    let mut trail = vec![problem.start];
    let mut current = problem.start;
    // route to the current target, cached until the target changes
    let mut target: Option<StateId> = None;
    let mut route: Vec<StateId> = Vec::new();
    let mut route_index: HashMap<StateId, usize> = HashMap::new();

    let mut ticks = 0;
    while current != problem.goal {
        if ticks == cfg.step_cap {
            sol.expansions = machine.closed_count;
            sol.finish(Outcome::StepCapExceeded);
            return sol;
        }
        ticks += 1;

        if !machine.goal_closed() {
            match machine.run(cfg.expansions_per_move as u64) {
                MachineStatus::OpenExhausted if !machine.goal_closed() => {
                    sol.expansions = machine.closed_count;
                    sol.finish(Outcome::Unreachable);
                    return sol;
                }
                _ => {}
            }
        }
        let tick_target = if machine.goal_closed() {
            problem.goal
        } else {
            match machine.best_open() {
                Some(t) => t,
                None => {
                    sol.expansions = machine.closed_count;
                    sol.finish(Outcome::Unreachable);
                    return sol;
                }
            }
        };
        if target != Some(tick_target) {
            target = Some(tick_target);
            route = machine.path_to(tick_target);
            route_index = route.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        }

        match route_index.get(&current) {
            Some(&pos) if pos + 1 < route.len() => {
                let next = route[pos + 1];
                let w = space.edge_cost(current, next).expect("routes follow edges");
                sol.record_move(next, w);
                trail.push(next);
                current = next;
            }
            Some(_) => {
                // standing at a non-goal target: wait for the planner
            }
            None => {
                // off the route: retreat one move along the walked trail
                trail.pop();
                let back = *trail.last().expect("the trail is rooted at the start");
                let w = space.edge_cost(current, back).expect("the trail follows edges");
                sol.record_move(back, w);
                current = back;
            }
        }
    }
    sol.expansions = machine.closed_count;
    sol.finish(Outcome::Solved);
    sol
}
