use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

use crate::scalar::Scalar;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

/// Open-list entry. The heap is a max-heap, so `Ord` is arranged to pop the
/// entry with the smallest f, breaking ties toward larger g (deeper, more
/// informed) and then smaller id. f and g order by their cost buckets:
/// without the tolerance, ulp noise between equal-cost paths would shuffle
/// true ties ahead of the g tie-break and the expansion frontier would hop
/// between equally good routes.
struct Entry<S: Scalar> {
    fq: i64,
    gq: i64,
    /// Exact g, for staleness checks against the g table.
    g: OrderedFloat<S>,
    id: StateId,
}

impl<S: Scalar> Entry<S> {
    fn new(f: S, g: S, id: StateId) -> Self {
        Entry { fq: cost_bucket(f), gq: cost_bucket(g), g: OrderedFloat(g), id }
    }
}

impl<S: Scalar> PartialEq for Entry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl<S: Scalar> Eq for Entry<S> {}

impl<S: Scalar> Ord for Entry<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other
            .fq
            .cmp(&self.fq)
            .then(self.gq.cmp(&other.gq))
            .then(other.id.cmp(&self.id))
    }
}

impl<S: Scalar> PartialOrd for Entry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) enum MachineStatus {
    /// The goal was closed; the incumbent path is optimal.
    GoalClosed,
    /// The open list drained without closing the goal: unreachable.
    OpenExhausted,
    /// Budget spent, search paused mid-way.
    Paused,
}

/// Resumable A* search. Runs in expansion-sized slices so callers can
/// interleave planning with acting; `astar` drives it to completion.
pub(crate) struct AStarMachine<'a, S: Scalar> {
    space: &'a SearchSpace<S>,
    goal: StateId,
    g: Vec<Option<S>>,
    parent: Vec<Option<StateId>>,
    closed: Vec<bool>,
    open: BinaryHeap<Entry<S>>,
    pub closed_count: u64,
    finished: Option<bool>, // Some(true) = goal closed, Some(false) = exhausted
}

impl<'a, S: Scalar> AStarMachine<'a, S> {
    pub fn new(space: &'a SearchSpace<S>, start: StateId, goal: StateId) -> Self {
        let n = space.num_states();
        let mut m = AStarMachine {
            space,
            goal,
            g: vec![None; n],
            parent: vec![None; n],
            closed: vec![false; n],
            open: BinaryHeap::new(),
            closed_count: 0,
            finished: None,
        };
        m.g[start.index()] = Some(S::of(0.0));
        m.open.push(Entry {
            f: OrderedFloat(space.base_h(start, goal)),
            g: OrderedFloat(S::of(0.0)),
            id: start,
        });
        m
    }

    fn pop_live(&mut self) -> Option<Entry<S>> {
        while let Some(e) = self.open.pop() {
            if self.closed[e.id.index()] {
                continue;
            }
            match self.g[e.id.index()] {
                Some(g) if OrderedFloat(g) == e.g => return Some(e),
                _ => continue, // stale duplicate
            }
        }
        None
    }

    /// Expand up to `budget` states. The goal itself counts as an expansion
    /// when popped, which terminates the search.
    pub fn run(&mut self, budget: u64) -> MachineStatus {
        if let Some(done) = self.finished {
            return if done {
                MachineStatus::GoalClosed
            } else {
                MachineStatus::OpenExhausted
            };
        }
        for _ in 0..budget {
            let Some(e) = self.pop_live() else {
                self.finished = Some(false);
                return MachineStatus::OpenExhausted;
            };
            let s = e.id;
            self.closed[s.index()] = true;
            self.closed_count += 1;
            if s == self.goal {
                self.finished = Some(true);
                return MachineStatus::GoalClosed;
            }
            let gs = e.g.0;
            for &(n, w) in self.space.neighbor_row(s) {
                if self.closed[n.index()] {
                    continue;
                }
                let ng = gs + w;
                let better = match self.g[n.index()] {
                    None => true,
                    Some(old) => ng < old,
                };
                if better {
                    self.g[n.index()] = Some(ng);
                    self.parent[n.index()] = Some(s);
                    self.open.push(Entry {
                        f: OrderedFloat(ng + self.space.base_h(n, self.goal)),
                        g: OrderedFloat(ng),
                        id: n,
                    });
                }
            }
        }
        MachineStatus::Paused
    }

    pub fn goal_closed(&self) -> bool {
        self.finished == Some(true)
    }

    /// Best live open state, or None when the open list is drained.
    pub fn best_open(&mut self) -> Option<StateId> {
        while let Some(e) = self.open.peek() {
            let live = !self.closed[e.id.index()]
                && self.g[e.id.index()].map(OrderedFloat) == Some(e.g);
            if live {
                return Some(e.id);
            }
            self.open.pop();
        }
        None
    }

    /// Walk parent pointers from `t` back to the search root.
    pub fn path_to(&self, t: StateId) -> Vec<StateId> {
        let mut path = vec![t];
        let mut cur = t;
        while let Some(p) = self.parent[cur.index()] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn open_len(&self) -> u64 {
        // distinct live states, not raw heap entries
        self.g
            .iter()
            .zip(&self.closed)
            .filter(|(g, c)| g.is_some() && !**c)
            .count() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AStarStats {
    /// States expanded, goal included.
    pub closed: u64,
    /// Distinct states still open when the search stopped.
    pub open_at_end: u64,
}

/// Full (non-real-time) A*. Solved solutions carry an optimal-cost path;
/// an unreachable goal yields an unsolved solution, not an error.
pub fn astar<S: Scalar>(space: &SearchSpace<S>, problem: Problem) -> (Solution<S>, AStarStats) {
    let mut m = AStarMachine::new(space, problem.start, problem.goal);
    loop {
        match m.run(u64::MAX) {
            MachineStatus::Paused => continue,
            MachineStatus::GoalClosed => {
                let mut sol = Solution::start_at(problem.start);
                let path = m.path_to(problem.goal);
                for pair in path.windows(2) {
                    let w = space
                        .edge_cost(pair[0], pair[1])
                        .expect("parent links follow edges");
                    sol.record_move(pair[1], w);
                }
                sol.expansions = m.closed_count;
                sol.finish(Outcome::Solved);
                let stats = AStarStats { closed: m.closed_count, open_at_end: m.open_len() };
                return (sol, stats);
            }
            MachineStatus::OpenExhausted => {
                let mut sol = Solution::start_at(problem.start);
                sol.expansions = m.closed_count;
                sol.finish(Outcome::Unreachable);
                let stats = AStarStats { closed: m.closed_count, open_at_end: 0 };
                return (sol, stats);
            }
        }
    }
}

/// Single-source shortest-path distances; unreachable states are None.
pub fn dijkstra_from<S: Scalar>(space: &SearchSpace<S>, source: StateId) -> Vec<Option<S>> {
    dijkstra_tree(space, source).0
}

/// Distances plus shortest-path-tree parents. Ties in distance are settled
/// by popping smaller ids first and keeping the first parent that set the
/// final distance, so the tree is deterministic.
pub(crate) fn dijkstra_tree<S: Scalar>(
    space: &SearchSpace<S>,
    source: StateId,
) -> (Vec<Option<S>>, Vec<Option<StateId>>) {
    let n = space.num_states();
    let mut dist: Vec<Option<S>> = vec![None; n];
    let mut parent: Vec<Option<StateId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<std::cmp::Reverse<(OrderedFloat<S>, StateId)>> = BinaryHeap::new();
    dist[source.index()] = Some(S::of(0.0));
    heap.push(std::cmp::Reverse((OrderedFloat(S::of(0.0)), source)));
    while let Some(std::cmp::Reverse((d, s))) = heap.pop() {
        if done[s.index()] {
            continue;
        }
        if dist[s.index()].map(OrderedFloat) != Some(d) {
            continue;
        }
        done[s.index()] = true;
        for &(v, w) in space.neighbor_row(s) {
            if done[v.index()] {
                continue;
            }
            let nd = d.0 + w;
            let better = match dist[v.index()] {
                None => true,
                Some(old) => nd < old,
            };
            if better {
                dist[v.index()] = Some(nd);
                parent[v.index()] = Some(s);
                heap.push(std::cmp::Reverse((OrderedFloat(nd), v)));
            }
        }
    }
    (dist, parent)
}
