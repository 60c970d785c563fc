use ordered_float::OrderedFloat;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::compress::compress_path;
use crate::error::{Error, Result};
use crate::heuristic::HeuristicOverlay;
use crate::realtime::{astar, hill_climb, lrta_star, lrta_star_with_overlay, Climb, LssConfig};
use crate::scalar::Scalar;
use crate::seeds::derive_seed;
use crate::solution::{Outcome, Solution};
use crate::space::{Problem, SearchSpace, StateId};

/// One optimally-solved training problem, kept as its compressed chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnRecord {
    pub start: StateId,
    pub goal: StateId,
    /// Subgoals in travel order; the final element is `goal`.
    pub chain: Vec<StateId>,
}

#[derive(Debug, Clone)]
pub struct KnnDatabase {
    pub records: Vec<KnnRecord>,
    /// Hill-climbing bound used when the chains were compressed.
    pub hc_bound: usize,
}

/// Solve `n` random problems optimally and store their compressed paths.
/// Deterministic per seed regardless of thread count: each record index
/// draws from its own derived seed stream.
pub fn build_knn_db<S: Scalar>(
    space: &SearchSpace<S>,
    n: usize,
    bound: usize,
    seed: u64,
) -> Result<KnnDatabase> {
    if n == 0 {
        return Err(Error::Usage("a subgoal database needs at least one record".into()));
    }
    if space.num_states() < 2 {
        return Err(Error::Build("cannot draw problems from a space with fewer than 2 states".into()));
    }
    let records: Result<Vec<KnnRecord>> = (0..n)
        .into_par_iter()
        .map(|i| build_record(space, bound, derive_seed(seed, i as u64)))
        .collect();
    Ok(KnnDatabase { records: records?, hc_bound: bound })
}

const DRAW_ATTEMPTS: usize = 1000;

fn build_record<S: Scalar>(space: &SearchSpace<S>, bound: usize, seed: u64) -> Result<KnnRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.num_states() as u32;
    for _ in 0..DRAW_ATTEMPTS {
        let start = StateId(rng.gen_range(0..n));
        let goal = StateId(rng.gen_range(0..n));
        if start == goal {
            continue;
        }
        let (sol, _) = astar(space, Problem::new(start, goal).expect("endpoints distinct"));
        if !sol.solved {
            continue;
        }
        let chain = compress_path(space, &sol.path, bound)?;
        return Ok(KnnRecord { start, goal, chain });
    }
    Err(Error::Build(format!(
        "no solvable random problem found in {DRAW_ATTEMPTS} draws; the space may be too fragmented"
    )))
}

/// How similar a stored record is to the problem at hand: heuristic
/// distance between the starts plus heuristic distance between the goals
/// (smaller is more similar).
fn similarity<S: Scalar>(space: &SearchSpace<S>, p: Problem, r: &KnnRecord) -> S {
    space.base_h(p.start, r.start) + space.base_h(p.goal, r.goal)
}

/// Real-time solving against the record database: among the `m` most
/// similar records, commit to the first whose start is hill-climbable from
/// the problem start and whose goal hill-climbs to the problem goal, then
/// travel start → record start → chain subgoals (each a fresh learning
/// target) → record goal → goal. With no usable record the run falls back
/// to plain learning real-time search toward the global goal.
pub fn solve_knn<S: Scalar>(
    space: &SearchSpace<S>,
    db: &KnnDatabase,
    problem: Problem,
    m: usize,
    bound: usize,
    cfg: LssConfig,
) -> Solution<S> {
    // rank by similarity ascending, ties by record index
    let mut order: Vec<usize> = (0..db.records.len()).collect();
    order.sort_by_key(|&i| OrderedFloat(similarity(space, problem, &db.records[i])));

    for &i in order.iter().take(m) {
        let rec = &db.records[i];
        let into = hill_climb(space, problem.start, rec.start, bound);
        if !into.reached {
            continue;
        }
        let outof = hill_climb(space, rec.goal, problem.goal, bound);
        if !outof.reached {
            continue;
        }
        return run_record(space, rec, problem, into, outof, cfg);
    }
    lrta_star(space, problem, cfg)
}

/// Append a greedy walk to the trajectory, re-deriving per-edge costs.
fn absorb_climb<S: Scalar>(sol: &mut Solution<S>, space: &SearchSpace<S>, climb: &Climb<S>) {
    for pair in climb.path.windows(2) {
        let w = space.edge_cost(pair[0], pair[1]).expect("climbs follow edges");
        sol.record_move(pair[1], w);
    }
}

fn run_record<S: Scalar>(
    space: &SearchSpace<S>,
    rec: &KnnRecord,
    problem: Problem,
    into: Climb<S>,
    outof: Climb<S>,
    cfg: LssConfig,
) -> Solution<S> {
    let mut sol = Solution::start_at(problem.start);
    absorb_climb(&mut sol, space, &into);
    let mut budget = cfg.step_cap.saturating_sub(sol.moves());
    for &subgoal in &rec.chain {
        let cur = sol.position();
        if cur == subgoal {
            continue;
        }
        if budget == 0 {
            sol.finish(Outcome::StepCapExceeded);
            return sol;
        }
        let mut overlay = HeuristicOverlay::new(subgoal);
        let leg = lrta_star_with_overlay(
            space,
            &mut overlay,
            Problem::new(cur, subgoal).expect("distinct endpoints checked"),
            LssConfig::new(cfg.lookahead, budget),
        );
        let ok = leg.solved;
        let outcome = leg.outcome;
        sol.absorb(leg);
        if !ok {
            sol.finish(outcome);
            return sol;
        }
        budget = cfg.step_cap.saturating_sub(sol.moves());
    }
    absorb_climb(&mut sol, space, &outof);
    sol.finish(Outcome::Solved);
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::GridMap;
    use crate::realtime::hc_reachable;
    use crate::solution::suboptimality;

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

    #[test]
    fn build_is_deterministic_and_certified() {
        let (sp, _) = trap();
        let a = build_knn_db(&sp, 25, 250, 42).unwrap();
        let b = build_knn_db(&sp, 25, 250, 42).unwrap();
        assert_eq!(a.records, b.records);
        for rec in &a.records {
            assert_eq!(*rec.chain.last().unwrap(), rec.goal);
            let mut from = rec.start;
            for &c in &rec.chain {
                assert!(hc_reachable(&sp, from, c, a.hc_bound));
                from = c;
            }
        }
        let c = build_knn_db(&sp, 25, 250, 43).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn zero_records_is_a_usage_error() {
        let (sp, _) = grid("...");
        assert!(matches!(build_knn_db(&sp, 0, 250, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn single_record_on_open_grid_has_unit_chain() {
        let (sp, _) = grid("......\n......\n......");
        let db = build_knn_db(&sp, 1, 250, 5).unwrap();
        assert_eq!(db.records.len(), 1);
        assert_eq!(db.records[0].chain.len(), 1);
    }

    #[test]
    fn exact_match_record_replays_optimally() {
        let (sp, g) = grid("......\n......\n......\n......");
        let start = g.state_at(0, 0).unwrap();
        let goal = g.state_at(5, 3).unwrap();
        let p = Problem::new(start, goal).unwrap();
        let (opt, _) = astar(&sp, p);
        // craft a database holding exactly this problem
        let chain = compress_path(&sp, &opt.path, 250).unwrap();
        let db = KnnDatabase {
            records: vec![KnnRecord { start, goal, chain }],
            hc_bound: 250,
        };
        let sol = solve_knn(&sp, &db, p, 10, 250, LssConfig::for_space(1, &sp));
        assert!(sol.solved);
        assert!(suboptimality(sol.cost, opt.cost).unwrap() <= 1.0 + 1e-6);
    }

    #[test]
    fn no_candidate_falls_back_to_plain_search_exactly() {
        let (sp, g) = trap();
        let start = g.state_at(0, 2).unwrap();
        let goal = g.state_at(4, 2).unwrap();
        let p = Problem::new(start, goal).unwrap();
        let db = KnnDatabase { records: vec![], hc_bound: 250 };
        let cfg = LssConfig::for_space(1, &sp);
        let viaknn = solve_knn(&sp, &db, p, 10, 250, cfg);
        let plain = lrta_star(&sp, p, cfg);
        assert_eq!(viaknn.path, plain.path, "fallback must be the plain agent verbatim");
        assert_eq!(viaknn.cost, plain.cost);
        assert_eq!(viaknn.heuristic_updates, plain.heuristic_updates);
    }

    #[test]
    fn m_zero_always_falls_back() {
        let (sp, g) = trap();
        let start = g.state_at(0, 2).unwrap();
        let goal = g.state_at(4, 2).unwrap();
        let p = Problem::new(start, goal).unwrap();
        let db = build_knn_db(&sp, 10, 250, 3).unwrap();
        let cfg = LssConfig::for_space(1, &sp);
        let viaknn = solve_knn(&sp, &db, p, 0, 250, cfg);
        let plain = lrta_star(&sp, p, cfg);
        assert_eq!(viaknn.path, plain.path);
    }

    #[test]
    fn solves_across_the_trap_via_records() {
        let (sp, g) = trap();
        let db = build_knn_db(&sp, 40, 250, 7).unwrap();
        let start = g.state_at(0, 2).unwrap();
        let goal = g.state_at(4, 2).unwrap();
        let p = Problem::new(start, goal).unwrap();
        let sol = solve_knn(&sp, &db, p, 10, 250, LssConfig::for_space(1, &sp));
        assert!(sol.solved);
        assert!((sp.walk_cost(&sol.path).unwrap() - sol.cost).abs() < 1e-9);
        assert!(sol.cost >= 7.4 - 1e-9);
    }
}
