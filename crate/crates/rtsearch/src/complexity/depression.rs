//! Heuristic depressions: connected regions whose heuristic values do not
//! exceed any immediately surrounding value, so a greedy agent that enters
//! cannot leave without first raising its heuristic. A depression is
//! *locally maximal* when no single surrounding state can be added without
//! breaking that condition.

use std::collections::{HashMap, VecDeque};

use crate::scalar::Scalar;
use crate::space::{SearchSpace, StateId};

/// One locally maximal depression for a fixed goal.
#[derive(Debug, Clone)]
pub struct Depression {
    pub members: Vec<StateId>,
    /// Lowest heuristic value on the immediately surrounding rim — the level
    /// the basin fills to. None when the set is an entire connected
    /// component and has no rim at all.
    pub fill_level: Option<f64>,
    /// The goal's own depression is not inhibitive and is excluded from
    /// width and capacity.
    pub contains_goal: bool,
}

#[derive(Debug, Clone)]
pub struct DepressionAnalysis {
    pub depressions: Vec<Depression>,
    /// Per state: fill level minus heuristic value, maximized over the
    /// depressions containing it; 0 outside depressions and in rim-less
    /// (whole-component) ones.
    pub depth: Vec<f64>,
    /// Per state: member of at least one maximal depression not containing
    /// the goal.
    pub depressed: Vec<bool>,
    /// Number of depressed states.
    pub width: usize,
    /// Sum of depths over all depressed states.
    pub capacity: f64,
}

struct Dsu {
    parent: Vec<u32>,
    members: Vec<Vec<u32>>,
    has_goal: Vec<bool>,
}

impl Dsu {
    fn new(n: usize, goal: StateId) -> Self {
        let mut has_goal = vec![false; n];
        has_goal[goal.index()] = true;
        Dsu {
            parent: (0..n as u32).collect(),
            members: (0..n as u32).map(|i| vec![i]).collect(),
            has_goal,
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.members[ra as usize].len() >= self.members[rb as usize].len() {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        let moved = std::mem::take(&mut self.members[small as usize]);
        self.members[big as usize].extend(moved);
        self.has_goal[big as usize] |= self.has_goal[small as usize];
    }
}

/// Enumerate locally maximal depressions for `goal` by a rising-level sweep:
/// states enter in ascending heuristic order, basins grow as union-find
/// components, and a basin is reported each time the current level is
/// exactly its rim minimum (certified by an adjacent same-level state that
/// stays outside). Plateaus — groups of equal-valued states — are split by
/// a closure rule: a plateau state joins a basin only if every lower
/// neighbor it has already belongs to that basin.
pub fn find_depressions<S: Scalar>(space: &SearchSpace<S>, goal: StateId) -> DepressionAnalysis {
    let n = space.num_states();
    let h: Vec<f64> = (0..n as u32)
        .map(|i| space.base_h(StateId(i), goal).f64())
        .collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        h[a as usize]
            .partial_cmp(&h[b as usize])
            .expect("heuristic values are finite")
            .then(a.cmp(&b))
    });

    let mut dsu = Dsu::new(n, goal);
    let mut inserted = vec![false; n];
    let mut fill = vec![f64::NAN; n];
    let mut depressions: Vec<Depression> = Vec::new();

    let mut i = 0;
    while i < n {
        let v = h[order[i] as usize];
        let mut j = i;
        while j < n && h[order[j] as usize] == v {
            j += 1;
        }
        let group = &order[i..j];
        level_pass(space, &h, group, v, goal, &mut dsu, &inserted, &mut fill, &mut depressions);
        for &p in group {
            inserted[p as usize] = true;
        }
        for &p in group {
            for &(nb, _) in space.neighbor_row(StateId(p)) {
                if inserted[nb.index()] {
                    dsu.union(p, nb.0);
                }
            }
        }
        i = j;
    }

    // Whole components are vacuously maximal: no surrounding state exists.
    // The goal's component is recorded but excluded; others count toward
    // width with zero depth (no rim, no fill level).
    let mut depressed = vec![false; n];
    let mut component_root = vec![false; n];
    for s in 0..n as u32 {
        let r = dsu.find(s);
        if !component_root[r as usize] {
            component_root[r as usize] = true;
            let mut members: Vec<u32> = dsu.members[r as usize].clone();
            members.sort_unstable();
            depressions.push(Depression {
                members: members.iter().map(|&m| StateId(m)).collect(),
                fill_level: None,
                contains_goal: dsu.has_goal[r as usize],
            });
        }
        if !dsu.has_goal[r as usize] {
            depressed[s as usize] = true;
        }
    }
    let mut depth = vec![0.0; n];
    for s in 0..n {
        if !fill[s].is_nan() {
            depth[s] = (fill[s] - h[s]).max(0.0);
            depressed[s] = true;
        }
    }
    let width = depressed.iter().filter(|&&d| d).count();
    let capacity = depth.iter().sum();

    DepressionAnalysis { depressions, depth, depressed, width, capacity }
}

#[allow(clippy::too_many_arguments)]
fn level_pass<S: Scalar>(
    space: &SearchSpace<S>,
    h: &[f64],
    group: &[u32],
    v: f64,
    goal: StateId,
    dsu: &mut Dsu,
    inserted: &[bool],
    fill: &mut [f64],
    depressions: &mut Vec<Depression>,
) {
    // For each state at this level: the basins directly below it and its
    // same-level neighbors.
    let mut below: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut plat_nbrs: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut root_plateau: HashMap<u32, Vec<u32>> = HashMap::new();
    for &p in group {
        let mut br: Vec<u32> = Vec::new();
        let mut pn: Vec<u32> = Vec::new();
        for &(nb, _) in space.neighbor_row(StateId(p)) {
            let ni = nb.index();
            if inserted[ni] {
                br.push(dsu.find(nb.0));
            } else if h[ni] == v {
                pn.push(nb.0);
            }
        }
        br.sort_unstable();
        br.dedup();
        for &r in &br {
            root_plateau.entry(r).or_default().push(p);
        }
        below.insert(p, br);
        plat_nbrs.insert(p, pn);
    }

    // Basin-seeded candidates: one per basin, plus one per distinct multi-
    // basin drainage set (the lower basins of a plateau state that bridges
    // several of them — the bridge can only belong to their union). The
    // candidate is the chosen basins plus every plateau state whose lower
    // neighbors all drain into them. An adjacent plateau state left outside
    // certifies that the rim minimum is exactly this level, so the candidate
    // is a maximal depression: the outsider necessarily leaks elsewhere.
    let mut roots: Vec<u32> = root_plateau.keys().copied().collect();
    roots.sort_unstable();
    let mut candidates: Vec<Vec<u32>> = roots
        .iter()
        .filter(|&&r| !dsu.has_goal[r as usize])
        .map(|&r| vec![r])
        .collect();
    let mut multi: Vec<Vec<u32>> = below
        .values()
        .filter(|b| b.len() >= 2 && b.iter().all(|&r| !dsu.has_goal[r as usize]))
        .cloned()
        .collect();
    multi.sort();
    multi.dedup();
    candidates.extend(multi);

    for rset in &candidates {
        let mut verdict: HashMap<u32, bool> = HashMap::new();
        let mut chosen: Vec<u32> = Vec::new();
        let mut rim = false;
        let mut queue: VecDeque<u32> = rset
            .iter()
            .flat_map(|r| root_plateau.get(r).into_iter().flatten().copied())
            .collect();
        while let Some(p) = queue.pop_front() {
            if verdict.contains_key(&p) {
                continue;
            }
            let ok = below[&p].iter().all(|&x| rset.binary_search(&x).is_ok());
            verdict.insert(p, ok);
            if ok {
                chosen.push(p);
                for &q in &plat_nbrs[&p] {
                    queue.push_back(q);
                }
            } else {
                rim = true;
            }
        }
        if rim {
            let mut members: Vec<u32> = rset
                .iter()
                .flat_map(|&r| dsu.members[r as usize].iter().copied())
                .collect();
            members.extend_from_slice(&chosen);
            for &s in &members {
                fill[s as usize] = v;
            }
            members.sort_unstable();
            depressions.push(Depression {
                members: members.iter().map(|&m| StateId(m)).collect(),
                fill_level: Some(v),
                contains_goal: false,
            });
        }
    }

    // Plateau-only candidates: connected groups of same-level states with no
    // lower neighbor at all. A neighboring plateau state that does have
    // lower neighbors is the rim certificate.
    let mut seen: HashMap<u32, ()> = HashMap::new();
    for &p0 in group {
        if !below[&p0].is_empty() || seen.contains_key(&p0) {
            continue;
        }
        seen.insert(p0, ());
        let mut comp = vec![p0];
        let mut with_goal = p0 == goal.0;
        let mut rim = false;
        let mut k = 0;
        while k < comp.len() {
            let p = comp[k];
            k += 1;
            for &q in &plat_nbrs[&p] {
                if below[&q].is_empty() {
                    if seen.insert(q, ()).is_none() {
                        comp.push(q);
                        with_goal |= q == goal.0;
                    }
                } else {
                    rim = true;
                }
            }
        }
        if rim && !with_goal {
            for &s in &comp {
                fill[s as usize] = v;
            }
            comp.sort_unstable();
            depressions.push(Depression {
                members: comp.iter().map(|&m| StateId(m)).collect(),
                fill_level: Some(v),
                contains_goal: false,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::GridMap;
    use proptest::prelude::*;

    fn grid(text: &str) -> (SearchSpace<f64>, GridMap) {
        let lines: Vec<&str> = text.trim().lines().map(str::trim).collect();
        let (w, h) = (lines[0].len(), lines.len());
        let open = lines.concat().chars().map(|c| c == '.').collect();
        let g = GridMap::from_cells(w, h, open).unwrap();
        let sp = g.to_space();
        (sp, g)
    }

    fn trap() -> (SearchSpace<f64>, GridMap) {
        grid(
            ".....\n\
             .@@..\n\
             ..@..\n\
             .@@..\n\
             .....",
        )
    }

    /// Exhaustive reference: every connected subset, tested literally
    /// against the depression condition and single-state maximality.
    /// Returns (depressed flags, per-state depth) over non-goal sets.
    fn oracle(space: &SearchSpace<f64>, goal: StateId) -> (Vec<bool>, Vec<f64>) {
        let n = space.num_states();
        assert!(n <= 20, "oracle is exponential; keep fixtures small");
        let h: Vec<f64> = (0..n as u32).map(|i| space.base_h(StateId(i), goal)).collect();
        let adj: Vec<u32> = (0..n as u32)
            .map(|i| {
                space
                    .neighbor_row(StateId(i))
                    .iter()
                    .fold(0u32, |m, &(nb, _)| m | (1 << nb.0))
            })
            .collect();
        let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };

        let connected = |mask: u32| -> bool {
            let start = mask.trailing_zeros();
            let mut reach = 1u32 << start;
            loop {
                let mut grown = reach;
                let mut bits = reach;
                while bits != 0 {
                    let s = bits.trailing_zeros();
                    bits &= bits - 1;
                    grown |= adj[s as usize] & mask;
                }
                if grown == reach {
                    return reach == mask;
                }
                reach = grown;
            }
        };
        let rim_of = |mask: u32| -> u32 {
            let mut rim = 0u32;
            let mut bits = mask;
            while bits != 0 {
                let s = bits.trailing_zeros();
                bits &= bits - 1;
                rim |= adj[s as usize] & !mask;
            }
            rim & full
        };
        let max_h = |mask: u32| -> f64 {
            let mut best = f64::NEG_INFINITY;
            let mut bits = mask;
            while bits != 0 {
                let s = bits.trailing_zeros();
                bits &= bits - 1;
                best = best.max(h[s as usize]);
            }
            best
        };
        let min_h = |mask: u32| -> f64 {
            let mut best = f64::INFINITY;
            let mut bits = mask;
            while bits != 0 {
                let s = bits.trailing_zeros();
                bits &= bits - 1;
                best = best.min(h[s as usize]);
            }
            best
        };

        let mut depressed = vec![false; n];
        let mut depth = vec![0.0f64; n];
        for mask in 1u32..=full {
            if !connected(mask) {
                continue;
            }
            let rim = rim_of(mask);
            let top = max_h(mask);
            let rim_min = min_h(rim);
            if top > rim_min {
                continue;
            }
            let mut maximal = true;
            let mut rbits = rim;
            while rbits != 0 {
                let r = rbits.trailing_zeros();
                rbits &= rbits - 1;
                let grown = mask | (1 << r);
                if top.max(h[r as usize]) <= min_h(rim_of(grown)) {
                    maximal = false;
                    break;
                }
            }
            if !maximal || mask & (1 << goal.0) != 0 {
                continue;
            }
            let mut bits = mask;
            while bits != 0 {
                let s = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                depressed[s] = true;
                if rim_min.is_finite() {
                    depth[s] = depth[s].max(rim_min - h[s]);
                }
            }
        }
        (depressed, depth)
    }

    fn assert_matches_oracle(space: &SearchSpace<f64>, goal: StateId) {
        let got = find_depressions(space, goal);
        let (want_flags, want_depth) = oracle(space, goal);
        assert_eq!(got.depressed, want_flags, "membership mismatch for goal {goal:?}");
        for s in 0..space.num_states() {
            assert!(
                (got.depth[s] - want_depth[s]).abs() < 1e-9,
                "depth mismatch at state {s}: got {} want {} (goal {goal:?})",
                got.depth[s],
                want_depth[s]
            );
        }
    }

    #[test]
    fn open_grid_has_no_depressions() {
        let (sp, g) = grid("......\n......\n......\n......");
        for goal in [g.state_at(0, 0).unwrap(), g.state_at(3, 2).unwrap()] {
            let a = find_depressions(&sp, goal);
            assert_eq!(a.width, 0);
            assert_eq!(a.capacity, 0.0);
            assert_eq!(a.depressions.len(), 1);
            assert!(a.depressions[0].contains_goal);
            assert!(a.depressions[0].fill_level.is_none());
        }
    }

    #[test]
    fn u_trap_pocket_matches_oracle_exactly() {
        let (sp, g) = trap();
        let goal = g.state_at(4, 2).unwrap();
        assert_matches_oracle(&sp, goal);
        let a = find_depressions(&sp, goal);
        // the pocket plus the three cells walled in with it
        assert_eq!(a.width, 4);
        assert!((a.capacity - 3.4).abs() < 1e-9);
        let pocket = g.state_at(1, 2).unwrap();
        assert!((a.depth[pocket.index()] - 1.8).abs() < 1e-9);
        let listed: Vec<_> = a.depressions.iter().filter(|d| !d.contains_goal).collect();
        assert_eq!(listed.len(), 1);
        assert_eq!(listed[0].members.len(), 4);
        assert!((listed[0].fill_level.unwrap() - 4.8).abs() < 1e-9);
    }

    #[test]
    fn goal_inside_the_pit_excludes_its_own_basin() {
        let (sp, g) = trap();
        let goal = g.state_at(1, 2).unwrap(); // the pocket itself
        assert_matches_oracle(&sp, goal);
        let a = find_depressions(&sp, goal);
        // the pocket and its antechamber drain to the goal: not inhibitive
        assert!(!a.depressed[goal.index()]);
        assert!(!a.depressed[g.state_at(0, 2).unwrap().index()]);
        // walls distort reachability enough to leave pits elsewhere
        assert_eq!(a.width, 7);
    }

    #[test]
    fn separate_component_is_depressed_with_zero_depth() {
        let (sp, g) = grid("...@...");
        let goal = g.state_at(0, 0).unwrap();
        let a = find_depressions(&sp, goal);
        assert_eq!(a.width, 3);
        assert_eq!(a.capacity, 0.0);
        for x in 4..7 {
            assert!(a.depressed[g.state_at(x, 0).unwrap().index()]);
        }
        assert_matches_oracle(&sp, goal);
    }

    #[test]
    fn nested_basins_report_each_qualifying_level() {
        // path graph a(5) - b(1) - c(3) - d(0) - e(4) - goal(0): b and d are
        // pits separated by the saddle c, and the union {b,c,d} is a wider
        // basin under the higher rim min(a, e) = 4
        use crate::space::HeuristicKind;
        let coords = vec![(5.0, 0.0), (1.0, 0.0), (3.0, 0.0), (0.0, 0.0), (4.0, 0.0), (0.0, 0.0)];
        let edges = [
            (0u32, 1u32, 4.0),
            (1, 2, 2.0),
            (2, 3, 3.0),
            (3, 4, 4.0),
            (4, 5, 4.0),
        ];
        let sp = SearchSpace::<f64>::from_edges(coords, &edges, HeuristicKind::Euclidean).unwrap();
        let goal = StateId(5);
        assert_matches_oracle(&sp, goal);
        let a = find_depressions(&sp, goal);
        let mut fills: Vec<(usize, f64)> = a
            .depressions
            .iter()
            .filter_map(|d| d.fill_level.map(|f| (d.members.len(), f)))
            .collect();
        fills.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(fills, vec![(1, 3.0), (1, 3.0), (3, 4.0)]);
        assert_eq!(a.width, 3);
        assert!((a.depth[1] - 3.0).abs() < 1e-9);
        assert!((a.depth[3] - 4.0).abs() < 1e-9);
        assert!((a.capacity - 8.0).abs() < 1e-9);
    }

    #[test]
    fn walling_in_a_pocket_never_shrinks_the_width() {
        // family: a dividing wall grows one cell at a time, with the goal on
        // the far side; the trapped pocket can only get worse
        let stages = [
            ".........\n.........\n.........\n.........\n.........",
            ".........\n....@....\n.........\n.........\n.........",
            ".........\n....@....\n....@....\n.........\n.........",
            ".........\n....@....\n....@....\n....@....\n.........",
        ];
        let mut last = 0usize;
        for text in stages {
            let (sp, g) = grid(text);
            let goal = g.state_at(8, 2).unwrap();
            let a = find_depressions(&sp, goal);
            assert!(
                a.width >= last,
                "width fell from {last} to {} at stage:\n{text}",
                a.width
            );
            last = a.width;
        }
        assert!(last > 0, "the finished wall must trap something");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn agrees_with_exhaustive_oracle_on_small_grids(
            cells in proptest::collection::vec(prop::bool::weighted(0.75), 16),
            goal_pick in 0usize..16,
        ) {
            let open_count = cells.iter().filter(|&&c| c).count();
            prop_assume!(open_count >= 2);
            let g = GridMap::from_cells(4, 4, cells.clone()).unwrap();
            let sp = g.to_space();
            let goal = StateId((goal_pick % open_count) as u32);
            assert_matches_oracle(&sp, goal);
        }
    }
}
