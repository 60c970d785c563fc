use std::collections::{HashMap, VecDeque};

use ordered_float::OrderedFloat;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::compress::compress_path;
use crate::error::{Error, Result};
use crate::realtime::{astar, hc_reachable, hill_climb, Climb};
use crate::scalar::Scalar;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

#[derive(Debug, Clone, Copy)]
pub struct HcdpsParams {
    /// Hill-climbing cutoff for region growth, compression, and online legs.
    pub hc_bound: usize,
    /// Region-graph radius within which seed-to-seed base paths are computed.
    pub link_radius: usize,
    /// Build aborts once the partition needs more regions than this.
    pub max_regions: usize,
    pub seed: u64,
}

impl Default for HcdpsParams {
    fn default() -> Self {
        HcdpsParams { hc_bound: 250, link_radius: 1, max_regions: 800, seed: 0 }
    }
}

/// Partition of the space into hill-climbing regions plus a subgoal chain
/// for every ordered pair of regions in the same component.
#[derive(Debug, Clone)]
pub struct HcdpsDatabase {
    pub region_of: Vec<u32>,
    /// Seed state of each region; every member is mutually hill-climbable
    /// with it within `hc_bound`.
    pub seeds: Vec<StateId>,
    /// Region graph: regions sharing at least one cross edge, sorted.
    pub adjacency: Vec<Vec<u32>>,
    /// (from region, to region) -> subgoal chain from seed to seed.
    pub records: HashMap<(u32, u32), Vec<StateId>>,
    pub link_radius: usize,
    pub hc_bound: usize,
}

impl HcdpsDatabase {
    pub fn region(&self, s: StateId) -> u32 {
        self.region_of[s.index()]
    }

    pub fn num_regions(&self) -> usize {
        self.seeds.len()
    }
}

/// Partition the space into hill-climbing regions: grow breadth-first from
/// randomly ordered seeds, admitting a state if it borders the region and
/// is hill-climbable to and from the seed. Returns (region id per state,
/// seed per region). `max_regions = usize::MAX` disables the budget.
pub(crate) fn grow_regions<S: Scalar>(
    space: &SearchSpace<S>,
    bound: usize,
    max_regions: usize,
    seed: u64,
) -> Result<(Vec<u32>, Vec<StateId>)> {
    let n = space.num_states();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    const UNASSIGNED: u32 = u32::MAX;
    let mut region_of = vec![UNASSIGNED; n];
    let mut tested = vec![UNASSIGNED; n]; // last region this state was tried for
    let mut seeds: Vec<StateId> = Vec::new();
    for &raw in &order {
        if region_of[raw as usize] != UNASSIGNED {
            continue;
        }
        if seeds.len() == max_regions {
            return Err(Error::Build(format!(
                "region budget exhausted: more than {max_regions} regions needed to cover {n} states"
            )));
        }
        let seed_state = StateId(raw);
        let rid = seeds.len() as u32;
        seeds.push(seed_state);
        region_of[raw as usize] = rid;
        let mut queue = VecDeque::from([seed_state]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in space.neighbor_row(u) {
                let vi = v.index();
                if region_of[vi] != UNASSIGNED || tested[vi] == rid {
                    continue;
                }
                tested[vi] = rid;
                if hc_reachable(space, seed_state, v, bound)
                    && hc_reachable(space, v, seed_state, bound)
                {
                    region_of[vi] = rid;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok((region_of, seeds))
}

pub fn build_hcdps_db<S: Scalar>(
    space: &SearchSpace<S>,
    params: &HcdpsParams,
) -> Result<HcdpsDatabase> {
    let b = params.hc_bound;
    let (region_of, seeds) = grow_regions(space, b, params.max_regions, params.seed)?;
    let p = seeds.len();

    // Region graph from cross edges.
    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); p];
    for u in space.states() {
        let a = region_of[u.index()];
        for &(v, _) in space.neighbor_row(u) {
            let c = region_of[v.index()];
            if c != a {
                adjacency[a as usize].push(c);
            }
        }
    }
    for row in &mut adjacency {
        row.sort_unstable();
        row.dedup();
    }

    // Seed-to-seed base paths for region pairs within link_radius hops.
    let mut near_pairs: Vec<(u32, u32)> = Vec::new();
    for a in 0..p as u32 {
        let mut hop = HashMap::from([(a, 0usize)]);
        let mut ring = VecDeque::from([a]);
        while let Some(x) = ring.pop_front() {
            let d = hop[&x];
            if d == params.link_radius {
                continue;
            }
            for &y in &adjacency[x as usize] {
                if !hop.contains_key(&y) {
                    hop.insert(y, d + 1);
                    ring.push_back(y);
                    if y > a {
                        near_pairs.push((a, y));
                    }
                }
            }
        }
    }
    near_pairs.sort_unstable();
    let base: Vec<((u32, u32), Vec<StateId>, S)> = near_pairs
        .into_par_iter()
        .map(|(a, c)| {
            let p = Problem::new(seeds[a as usize], seeds[c as usize])
                .expect("region seeds are distinct states");
            let (sol, _) = astar(space, p);
            debug_assert!(sol.solved, "adjacent regions share a component");
            ((a, c), sol.path, sol.cost)
        })
        .collect();
    let mut base_paths: HashMap<(u32, u32), Vec<StateId>> = HashMap::new();
    let mut link_costs: Vec<Vec<(u32, S)>> = vec![Vec::new(); p];
    for ((a, c), path, cost) in base {
        let mut rev = path.clone();
        rev.reverse();
        base_paths.insert((a, c), path);
        base_paths.insert((c, a), rev);
        link_costs[a as usize].push((c, cost));
        link_costs[c as usize].push((a, cost));
    }

    // Cheapest region chains by Dijkstra over base-path costs, then each
    // ordered pair's concatenated seed route is compressed into a record.
    let mut pair_chains: Vec<((u32, u32), Vec<u32>)> = Vec::new();
    for a in 0..p as u32 {
        let mut dist: HashMap<u32, S> = HashMap::from([(a, S::zero())]);
        let mut parent: HashMap<u32, u32> = HashMap::new();
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((OrderedFloat(S::zero()), a)));
        while let Some(std::cmp::Reverse((OrderedFloat(d), x))) = heap.pop() {
            if dist.get(&x).is_some_and(|&best| d > best) {
                continue;
            }
            for &(y, w) in &link_costs[x as usize] {
                let nd = d + w;
                if dist.get(&y).map_or(true, |&best| nd < best) {
                    dist.insert(y, nd);
                    parent.insert(y, x);
                    heap.push(std::cmp::Reverse((OrderedFloat(nd), y)));
                }
            }
        }
        for (&c, _) in dist.iter() {
            if c == a {
                continue;
            }
            let mut chain = vec![c];
            let mut cur = c;
            while let Some(&prev) = parent.get(&cur) {
                chain.push(prev);
                cur = prev;
            }
            chain.reverse();
            pair_chains.push(((a, c), chain));
        }
    }
    pair_chains.sort_unstable_by_key(|&(key, _)| key);
    let records: Result<Vec<((u32, u32), Vec<StateId>)>> = pair_chains
        .into_par_iter()
        .map(|(key, chain)| {
            let mut walk: Vec<StateId> = base_paths[&(chain[0], chain[1])].clone();
            for hop in chain.windows(2).skip(1) {
                walk.extend_from_slice(&base_paths[&(hop[0], hop[1])][1..]);
            }
            compress_path(space, &walk, b).map(|c| (key, c))
        })
        .collect();

    Ok(HcdpsDatabase {
        region_of,
        seeds,
        adjacency,
        records: records?.into_iter().collect(),
        link_radius: params.link_radius,
        hc_bound: b,
    })
}

/// Append a completed climb, stopping at the move budget. Returns false if
/// the budget ran out first.
fn absorb_capped<S: Scalar>(
    sol: &mut Solution<S>,
    space: &SearchSpace<S>,
    climb: &Climb<S>,
    cap: usize,
) -> bool {
    for pair in climb.path.windows(2) {
        if sol.moves() >= cap {
            return false;
        }
        let w = space.edge_cost(pair[0], pair[1]).expect("climbs follow edges");
        sol.record_move(pair[1], w);
    }
    true
}

/// Online solving by pure hill-climbing through stored subgoals: start →
/// start-region seed → record chain → goal. Same-region problems climb
/// directly when possible, otherwise via the seed. Performs no heuristic
/// learning whatsoever; legs are certified by construction, so a failed leg
/// is reported as a guarantee violation.
pub fn solve_hcdps<S: Scalar>(
    space: &SearchSpace<S>,
    db: &HcdpsDatabase,
    problem: Problem,
    bound: usize,
    step_cap: usize,
) -> Solution<S> {
    let mut sol = Solution::start_at(problem.start);
    let ra = db.region(problem.start);
    let rb = db.region(problem.goal);

    let mut targets: Vec<StateId> = Vec::new();
    if ra == rb {
        let direct = hill_climb(space, problem.start, problem.goal, bound);
        if direct.reached {
            if !absorb_capped(&mut sol, space, &direct, step_cap) {
                sol.finish(Outcome::StepCapExceeded);
                return sol;
            }
            sol.finish(Outcome::Solved);
            return sol;
        }
        targets.push(db.seeds[ra as usize]);
        targets.push(problem.goal);
    } else {
        match db.records.get(&(ra, rb)) {
            None => {
                sol.finish(Outcome::Unreachable);
                return sol;
            }
            Some(chain) => {
                targets.push(db.seeds[ra as usize]);
                targets.extend_from_slice(chain);
                targets.push(problem.goal);
            }
        }
    }

    for &t in &targets {
        let cur = sol.position();
        if cur == t {
            continue;
        }
        let leg = hill_climb(space, cur, t, bound);
        if !leg.reached {
            sol.finish(Outcome::GuaranteeViolation);
            return sol;
        }
        if !absorb_capped(&mut sol, space, &leg, step_cap) {
            sol.finish(Outcome::StepCapExceeded);
            return sol;
        }
    }
    sol.finish(Outcome::Solved);
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{generate_maze, GridMap};
    use crate::solution::suboptimality;

    fn grid(text: &str) -> (SearchSpace<f64>, GridMap) {
        let lines: Vec<&str> = text.trim().lines().map(str::trim).collect();
        let (w, h) = (lines[0].len(), lines.len());
        let open = lines.concat().chars().map(|c| c == '.').collect();
        let g = GridMap::from_cells(w, h, open).unwrap();
        let sp = g.to_space();
        (sp, g)
    }

    /// Two rooms joined by a single door in the dividing wall.
    fn two_rooms() -> (SearchSpace<f64>, GridMap) {
        grid(
            "....@....\n\
             ....@....\n\
             .........\n\
             ....@....\n\
             ....@....",
        )
    }

    fn params(seed: u64) -> HcdpsParams {
        HcdpsParams { seed, ..HcdpsParams::default() }
    }

    fn certify(space: &SearchSpace<f64>, db: &HcdpsDatabase) {
        for s in space.states() {
            let seed = db.seeds[db.region(s) as usize];
            assert!(hc_reachable(space, s, seed, db.hc_bound), "{s:?} cannot reach its seed");
            assert!(hc_reachable(space, seed, s, db.hc_bound), "seed cannot reach {s:?}");
        }
    }

    #[test]
    fn open_grid_is_one_region_with_no_records() {
        let (sp, g) = grid("......\n......\n......\n......");
        let db = build_hcdps_db(&sp, &params(3)).unwrap();
        assert_eq!(db.num_regions(), 1);
        assert!(db.records.is_empty());
        certify(&sp, &db);
        let p = Problem::new(g.state_at(0, 0).unwrap(), g.state_at(5, 3).unwrap()).unwrap();
        let (opt, _) = astar(&sp, p);
        let sol = solve_hcdps(&sp, &db, p, 250, 10_000);
        assert!(sol.solved);
        assert_eq!(sol.heuristic_updates, 0);
        assert!(suboptimality(sol.cost, opt.cost).unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn two_rooms_split_and_cross_solves_without_learning() {
        let (sp, g) = two_rooms();
        let db = build_hcdps_db(&sp, &params(11)).unwrap();
        assert!(db.num_regions() >= 2, "door fixture must split");
        certify(&sp, &db);
        let start = g.state_at(0, 0).unwrap();
        let goal = g.state_at(8, 4).unwrap();
        let p = Problem::new(start, goal).unwrap();
        let sol = solve_hcdps(&sp, &db, p, 250, 10_000);
        assert!(sol.solved, "outcome {:?}", sol.outcome);
        assert_eq!(sol.heuristic_updates, 0, "hill-climbing must never learn");
        assert!((sp.walk_cost(&sol.path).unwrap() - sol.cost).abs() < 1e-9);
        if db.region(start) != db.region(goal) {
            assert!(db.records.contains_key(&(db.region(start), db.region(goal))));
        }
    }

    #[test]
    fn every_same_component_region_pair_has_a_record() {
        let (sp, _) = two_rooms();
        let db = build_hcdps_db(&sp, &params(11)).unwrap();
        let p = db.num_regions();
        // single-component fixture: all ordered pairs present
        assert_eq!(db.records.len(), p * p - p);
        for ((a, c), chain) in &db.records {
            assert_eq!(*chain.last().unwrap(), db.seeds[*c as usize]);
            let mut from = db.seeds[*a as usize];
            for &sub in chain {
                assert!(hc_reachable(&sp, from, sub, db.hc_bound));
                from = sub;
            }
        }
    }

    #[test]
    fn maze_record_count_matches_ordered_pairs() {
        let m = generate_maze(9, 9, 1, 4).unwrap();
        let sp = m.to_space();
        let db = build_hcdps_db(&sp, &HcdpsParams { seed: 4, max_regions: 4000, ..HcdpsParams::default() })
            .unwrap();
        let p = db.num_regions();
        assert!(p >= 2, "unit maze should fragment into several regions");
        assert_eq!(db.records.len(), p * p - p);
        certify(&sp, &db);
    }

    #[test]
    fn build_is_deterministic_per_seed() {
        let (sp, _) = two_rooms();
        let a = build_hcdps_db(&sp, &params(7)).unwrap();
        let b = build_hcdps_db(&sp, &params(7)).unwrap();
        assert_eq!(a.region_of, b.region_of);
        assert_eq!(a.seeds, b.seeds);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn region_budget_overflow_is_a_build_error() {
        let (sp, _) = two_rooms();
        let err = build_hcdps_db(&sp, &HcdpsParams { max_regions: 1, seed: 11, ..HcdpsParams::default() })
            .unwrap_err();
        match err {
            Error::Build(msg) => assert!(msg.contains("region budget"), "{msg}"),
            other => panic!("expected build error, got {other:?}"),
        }
    }

    #[test]
    fn seed_start_problem_skips_the_first_leg() {
        let (sp, g) = two_rooms();
        let db = build_hcdps_db(&sp, &params(11)).unwrap();
        let goal = g.state_at(8, 4).unwrap();
        let start = db.seeds[db.region(g.state_at(0, 0).unwrap()) as usize];
        if start == goal {
            return;
        }
        let sol = solve_hcdps(&sp, &db, Problem::new(start, goal).unwrap(), 250, 10_000);
        assert!(sol.solved);
        assert_eq!(sol.path.first(), Some(&start));
        assert_eq!(sol.heuristic_updates, 0);
    }

    #[test]
    fn same_region_pairs_always_solve_certified() {
        let (sp, _) = two_rooms();
        let db = build_hcdps_db(&sp, &params(11)).unwrap();
        for s in sp.states() {
            for t in sp.states() {
                if s == t || db.region(s) != db.region(t) {
                    continue;
                }
                let sol = solve_hcdps(&sp, &db, Problem::new(s, t).unwrap(), 250, 100_000);
                assert!(sol.solved, "{s:?} -> {t:?} in region {}", db.region(s));
                assert_eq!(sol.heuristic_updates, 0);
            }
        }
    }

    #[test]
    fn corrupt_record_reports_guarantee_violation() {
        let (sp, g) = two_rooms();
        let mut db = build_hcdps_db(&sp, &params(11)).unwrap();
        let start = g.state_at(0, 0).unwrap();
        let goal = g.state_at(8, 4).unwrap();
        let (ra, rb) = (db.region(start), db.region(goal));
        if ra == rb {
            return;
        }
        // splice in a subgoal that is not hill-climbable from the seed:
        // the far corner of the other room
        db.records.insert((ra, rb), vec![goal, db.seeds[rb as usize]]);
        let sol = solve_hcdps(&sp, &db, Problem::new(start, goal).unwrap(), 250, 10_000);
        if !sol.solved {
            assert_eq!(sol.outcome, Outcome::GuaranteeViolation);
        }
    }

    #[test]
    fn missing_record_means_unreachable() {
        let (sp, g) = grid("...@...");
        let db = build_hcdps_db(&sp, &params(2)).unwrap();
        assert_eq!(db.num_regions(), 2);
        assert!(db.records.is_empty());
        let p = Problem::new(g.state_at(0, 0).unwrap(), g.state_at(6, 0).unwrap()).unwrap();
        let sol = solve_hcdps(&sp, &db, p, 250, 1_000);
        assert!(!sol.solved);
        assert_eq!(sol.outcome, Outcome::Unreachable);
    }
}
