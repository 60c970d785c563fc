use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{SearchSpace, StateId};

/// Learned heuristic values layered over the base heuristic, toward one
/// fixed goal. Lives for a single solver run.
///
/// Values only ever increase: a raise below the current effective value is a
/// no-op, so the effective heuristic is monotone over the overlay's lifetime
/// and never drops below base.
#[derive(Clone, Debug)]
pub struct HeuristicOverlay<S = crate::Cost> {
    goal: StateId,
    raised: HashMap<StateId, S>,
    strict_raises: u64,
}

impl<S: Scalar> HeuristicOverlay<S> {
    pub fn new(goal: StateId) -> Self {
        HeuristicOverlay { goal, raised: HashMap::new(), strict_raises: 0 }
    }

    pub fn goal(&self) -> StateId {
        self.goal
    }

    /// Number of states with a stored (raised) value.
    pub fn len(&self) -> usize {
        self.raised.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raised.is_empty()
    }

    /// How many raises strictly increased a value.
    pub fn strict_raises(&self) -> u64 {
        self.strict_raises
    }

    /// Effective heuristic toward this overlay's goal.
    #[inline]
    pub fn h(&self, space: &SearchSpace<S>, s: StateId) -> S {
        match self.raised.get(&s) {
            Some(&v) => v,
            None => space.base_h(s, self.goal),
        }
    }

    /// Raise the value stored for `s` to `v`; ignored unless it increases
    /// the effective value.
    pub fn raise(&mut self, space: &SearchSpace<S>, s: StateId, v: S) {
        if v > self.h(space, s) {
            self.raised.insert(s, v);
            self.strict_raises += 1;
        }
    }

    /// Raised entries in ascending state order (stable for persistence).
    pub fn sorted_entries(&self) -> Vec<(StateId, S)> {
        let mut v: Vec<_> = self.raised.iter().map(|(k, val)| (*k, *val)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }
}

/// Checked overlay read: `overlay` must target `goal`.
pub fn effective_h<S: Scalar>(
    space: &SearchSpace<S>,
    overlay: &HeuristicOverlay<S>,
    s: StateId,
    goal: StateId,
) -> Result<S> {
    if overlay.goal != goal {
        return Err(Error::Usage(format!(
            "overlay targets goal {} but was queried for goal {}",
            overlay.goal, goal
        )));
    }
    Ok(overlay.h(space, s))
}
