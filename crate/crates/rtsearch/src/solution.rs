use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::StateId;

/// Why a solver run ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Solved,
    /// The per-problem move budget ran out first.
    StepCapExceeded,
    /// The goal is not reachable from the start.
    Unreachable,
    /// A leg that the offline database certifies as hill-climbable failed;
    /// indicates a corrupted or mismatched database.
    GuaranteeViolation,
}

/// One solver run: the trajectory actually walked plus counters.
///
/// `path` is the full walk including revisits, so `cost` is the sum of every
/// traversed edge and `visit_counts` holds one entry per state ever entered.
#[derive(Clone, Debug)]
pub struct Solution<S = crate::Cost> {
    pub path: Vec<StateId>,
    pub cost: S,
    pub visit_counts: HashMap<StateId, u32>,
    /// States expanded while planning (A* closed list, LRTA* lookahead).
    pub expansions: u64,
    /// Strict heuristic raises performed while solving; stays 0 for
    /// learning-free solvers.
    pub heuristic_updates: u64,
    pub solved: bool,
    pub outcome: Outcome,
}

impl<S: Scalar> Solution<S> {
    /// Fresh unsolved run sitting at `start` (which counts as entered once).
    pub fn start_at(start: StateId) -> Self {
        let mut visit_counts = HashMap::new();
        visit_counts.insert(start, 1);
        Solution {
            path: vec![start],
            cost: S::zero(),
            visit_counts,
            expansions: 0,
            heuristic_updates: 0,
            solved: false,
            outcome: Outcome::StepCapExceeded,
        }
    }

    /// Current end of the trajectory.
    pub fn position(&self) -> StateId {
        *self.path.last().expect("trajectory never empty")
    }

    /// Number of moves walked so far.
    pub fn moves(&self) -> usize {
        self.path.len() - 1
    }

    /// Walk one edge.
    pub fn record_move(&mut self, to: StateId, edge_cost: S) {
        self.path.push(to);
        self.cost = self.cost + edge_cost;
        *self.visit_counts.entry(to).or_insert(0) += 1;
    }

    /// Splice a sub-run that started where this one currently stands:
    /// trajectory, cost and counters are merged (the shared junction state
    /// is not double-counted).
    pub fn absorb(&mut self, leg: Solution<S>) {
        debug_assert_eq!(self.position(), leg.path[0]);
        self.path.extend_from_slice(&leg.path[1..]);
        self.cost = self.cost + leg.cost;
        for (s, c) in leg.visit_counts {
            let c = if s == leg.path[0] { c - 1 } else { c };
            if c > 0 {
                *self.visit_counts.entry(s).or_insert(0) += c;
            }
        }
        self.expansions += leg.expansions;
        self.heuristic_updates += leg.heuristic_updates;
    }

    pub fn finish(&mut self, outcome: Outcome) {
        self.outcome = outcome;
        self.solved = outcome == Outcome::Solved;
    }
}

/// Ratio of achieved cost to optimal cost. `optimal` must be positive.
pub fn suboptimality<S: Scalar>(cost: S, optimal: S) -> Result<f64> {
    if !(optimal > S::zero()) {
        return Err(Error::Usage(format!(
            "optimal cost must be positive, got {}",
            optimal
        )));
    }
    Ok(cost.f64() / optimal.f64())
}
