use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::clique::{clique_abstraction, num_partitions};
use crate::heuristic::HeuristicOverlay;
use crate::realtime::{dijkstra_tree, lrta_step, LssConfig};
use crate::scalar::Scalar;
use crate::seeds::derive_seed;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

/// Partition map plus per-partition-pair intermediate targets.
#[derive(Debug, Clone)]
pub struct DlrtaDatabase {
    /// Abstraction rounds used to build the partition.
    pub levels: usize,
    /// Partition id per state, dense in 0..num_partitions.
    pub partition_of: Vec<u32>,
    pub num_partitions: u32,
    /// One randomly drawn member per partition, indexed by partition id.
    pub representatives: Vec<StateId>,
    /// (start partition, goal partition) -> first state outside the start
    /// partition on an optimal path between their representatives.
    pub subgoals: HashMap<(u32, u32), StateId>,
}

impl DlrtaDatabase {
    pub fn partition(&self, s: StateId) -> u32 {
        self.partition_of[s.index()]
    }
}

/// Build the partition (clique abstraction), draw representatives, and
/// harvest one entry subgoal per ordered partition pair from optimal
/// representative-to-representative paths. Unreachable pairs get no entry.
pub fn build_dlrta_db<S: Scalar>(
    space: &SearchSpace<S>,
    levels: usize,
    seed: u64,
) -> DlrtaDatabase {
    let partition_of = clique_abstraction(space, levels);
    let parts = num_partitions(&partition_of);
    let mut members: Vec<Vec<StateId>> = vec![Vec::new(); parts as usize];
    for s in space.states() {
        members[partition_of[s.index()] as usize].push(s);
    }
    let representatives: Vec<StateId> = members
        .iter()
        .enumerate()
        .map(|(pid, m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, pid as u64));
            m[rng.gen_range(0..m.len())]
        })
        .collect();

    let mut subgoals = HashMap::new();
    for a in 0..parts {
        let (dist, parent) = dijkstra_tree(space, representatives[a as usize]);
        for b in 0..parts {
            if a == b || dist[representatives[b as usize].index()].is_none() {
                continue;
            }
            // walk rep(b) back to rep(a), then forward to the first state
            // that leaves partition a
            let mut path = Vec::new();
            let mut cur = representatives[b as usize];
            loop {
                path.push(cur);
                match parent[cur.index()] {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            path.reverse();
            let exit = path
                .iter()
                .find(|&&s| partition_of[s.index()] != a)
                .expect("path ends in another partition");
            subgoals.insert((a, b), *exit);
        }
    }
    DlrtaDatabase { levels, partition_of, num_partitions: parts, representatives, subgoals }
}

/// Real-time search steered by partition subgoals: the heuristic target is
/// the stored exit state for (current partition, goal partition), refreshed
/// on every partition change, with learning restarted per leg; inside the
/// goal partition the target is the goal itself.
pub fn solve_dlrta<S: Scalar>(
    space: &SearchSpace<S>,
    db: &DlrtaDatabase,
    problem: Problem,
    cfg: LssConfig,
) -> Solution<S> {
    let goal_part = db.partition(problem.goal);
    let mut sol = Solution::start_at(problem.start);
    let mut current = problem.start;
    let mut overlay: Option<HeuristicOverlay<S>> = None;
    let mut leg_part = u32::MAX;
    let mut moves = 0;
    while current != problem.goal {
        if moves == cfg.step_cap {
            if let Some(old) = overlay.take() {
                sol.heuristic_updates += old.strict_raises();
            }
            sol.finish(Outcome::StepCapExceeded);
            return sol;
        }
        let part = db.partition(current);
        if part != leg_part || overlay.is_none() {
            // entering a new partition: pick the new target and forget
            // leg-local learning
            leg_part = part;
            let target = if part == goal_part {
                problem.goal
            } else {
                // missing entry means the representatives could not reach
                // each other; fall back to the global goal
                db.subgoals.get(&(part, goal_part)).copied().unwrap_or(problem.goal)
            };
            if let Some(old) = overlay.take() {
                sol.heuristic_updates += old.strict_raises();
            }
            overlay = Some(HeuristicOverlay::new(target));
        }
        let ov = overlay.as_mut().expect("overlay initialized above");
        match lrta_step(space, ov, current, cfg.lookahead) {
            Some(step) => {
                sol.expansions += step.expanded;
                sol.record_move(step.to, step.edge);
                current = step.to;
                moves += 1;
            }
            None => {
                sol.finish(Outcome::Unreachable);
                if let Some(old) = overlay.take() {
                    sol.heuristic_updates += old.strict_raises();
                }
                return sol;
            }
        }
        // reaching a non-goal target means we are about to switch legs;
        // the partition test above handles it because every stored subgoal
        // lies outside its own start partition
    }
    if let Some(old) = overlay.take() {
        sol.heuristic_updates += old.strict_raises();
    }
    sol.finish(Outcome::Solved);
    sol
}
