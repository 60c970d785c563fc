use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Cost;

/// Dense index of a state; contiguous from zero within one space.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How `base_h` reads state coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HeuristicKind {
    /// Eight-connected grid distance `|dx - dy| + 1.4 * min(dx, dy)`,
    /// matching unit cardinal moves and 1.4 diagonal moves.
    Octile,
    /// Straight-line distance, times the space's heuristic scale
    /// (1.0 unless an admissibility scale was applied).
    Euclidean,
}

/// A start/goal pair. Start and goal are always distinct.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Problem {
    pub start: StateId,
    pub goal: StateId,
}

impl Problem {
    pub fn new(start: StateId, goal: StateId) -> Result<Self> {
        if start == goal {
            return Err(Error::Usage(format!("problem start equals goal ({start})")));
        }
        Ok(Problem { start, goal })
    }
}

/// Undirected explicit graph with per-state coordinates and a base heuristic.
///
/// Adjacency is CSR; each neighbor row is sorted by ascending id, which is
/// what makes every tie-break in the solvers deterministic. Edge costs are
/// strictly positive, finite and symmetric; there are no self-loops.
#[derive(Clone, Debug)]
pub struct SearchSpace<S = Cost> {
    offsets: Vec<u32>,
    edges: Vec<(StateId, S)>,
    coords: Vec<(f64, f64)>,
    kind: HeuristicKind,
    h_scale: f64,
}

impl<S: Scalar> SearchSpace<S> {
    /// Build from an undirected edge list. Both directions are inserted.
    ///
    /// Errors on endpoints out of range, self-loops, non-positive or
    /// non-finite costs, and duplicate edges.
    pub fn from_edges(
        coords: Vec<(f64, f64)>,
        undirected_edges: &[(u32, u32, S)],
        kind: HeuristicKind,
    ) -> Result<Self> {
        let n = coords.len();
        if n > u32::MAX as usize {
            return Err(Error::Usage(format!("too many states: {n}")));
        }
        let mut degree = vec![0u32; n];
        for &(a, b, w) in undirected_edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::Usage(format!("edge ({a},{b}) out of range for {n} states")));
            }
            if a == b {
                return Err(Error::Usage(format!("self-loop on state {a}")));
            }
            let wf = w.f64();
            if !(wf > 0.0) || !wf.is_finite() {
                return Err(Error::Usage(format!("edge ({a},{b}) has non-positive cost {wf}")));
            }
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let total = offsets[n] as usize;
        let mut edges = vec![(StateId(0), S::zero()); total];
        let mut cursor: Vec<u32> = offsets[..n].to_vec();
        for &(a, b, w) in undirected_edges {
            edges[cursor[a as usize] as usize] = (StateId(b), w);
            cursor[a as usize] += 1;
            edges[cursor[b as usize] as usize] = (StateId(a), w);
            cursor[b as usize] += 1;
        }
        for i in 0..n {
            let row = &mut edges[offsets[i] as usize..offsets[i + 1] as usize];
            row.sort_unstable_by_key(|(id, _)| *id);
            for pair in row.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(Error::Usage(format!(
                        "duplicate edge between {} and {}",
                        i, pair[0].0
                    )));
                }
            }
        }
        Ok(SearchSpace { offsets, edges, coords, kind, h_scale: 1.0 })
    }

    /// Scale applied to the euclidean heuristic (identity for octile).
    pub fn with_h_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Usage(format!("heuristic scale must be positive, got {scale}")));
        }
        self.h_scale = scale;
        Ok(self)
    }

    /// Largest factor that keeps the euclidean heuristic under every edge's
    /// cost-per-distance ratio; multiplying `h` by it restores admissibility
    /// when edge costs undercut straight-line distance. Edges between
    /// coincident coordinates are ignored; returns 1.0 if nothing constrains.
    pub fn admissible_h_scale(&self) -> f64 {
        let mut scale: f64 = 1.0;
        for s in self.states() {
            let (x1, y1) = self.coords[s.index()];
            for &(t, w) in self.neighbor_row(s) {
                if t <= s {
                    continue;
                }
                let (x2, y2) = self.coords[t.index()];
                let d = ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
                if d > 0.0 {
                    scale = scale.min(w.f64() / d);
                }
            }
        }
        scale
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.coords.len()
    }

    /// Undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.coords.len() as u32).map(StateId)
    }

    #[inline]
    pub fn neighbor_row(&self, s: StateId) -> &[(StateId, S)] {
        &self.edges[self.offsets[s.index()] as usize..self.offsets[s.index() + 1] as usize]
    }

    pub fn neighbors(&self, s: StateId) -> impl Iterator<Item = (StateId, S)> + '_ {
        self.neighbor_row(s).iter().copied()
    }

    #[inline]
    pub fn degree(&self, s: StateId) -> usize {
        self.neighbor_row(s).len()
    }

    /// Cost of the edge between adjacent states, if any.
    pub fn edge_cost(&self, a: StateId, b: StateId) -> Option<S> {
        let row = self.neighbor_row(a);
        row.binary_search_by_key(&b, |(id, _)| *id).ok().map(|i| row[i].1)
    }

    #[inline]
    pub fn coord(&self, s: StateId) -> (f64, f64) {
        self.coords[s.index()]
    }

    pub fn heuristic_kind(&self) -> HeuristicKind {
        self.kind
    }

    pub fn h_scale(&self) -> f64 {
        self.h_scale
    }

    /// Base heuristic estimate of the cost from `a` to `b`.
    #[inline]
    pub fn base_h(&self, a: StateId, b: StateId) -> S {
        let (x1, y1) = self.coords[a.index()];
        let (x2, y2) = self.coords[b.index()];
        let dx = (x1 - x2).abs();
        let dy = (y1 - y2).abs();
        match self.kind {
            HeuristicKind::Octile => S::of((dx - dy).abs() + 1.4 * dx.min(dy)),
            HeuristicKind::Euclidean => S::of((dx * dx + dy * dy).sqrt() * self.h_scale),
        }
    }

    /// Total cost of a walk (consecutive states adjacent); `None` if some
    /// hop is not an edge or the walk is empty.
    pub fn walk_cost(&self, path: &[StateId]) -> Option<S> {
        if path.is_empty() {
            return None;
        }
        let mut total = S::zero();
        for pair in path.windows(2) {
            total = total + self.edge_cost(pair[0], pair[1])?;
        }
        Some(total)
    }
}
