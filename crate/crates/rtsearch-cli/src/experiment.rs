//! The benchmark pipeline: carve sub-spaces out of the corpus, profile
//! them, generate problems, build databases, run every enabled algorithm,
//! and aggregate — all reproducible from (config, seed) alone.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rtsearch::complexity::{profile, ComplexityProfile};
use rtsearch::ingest::{sample_subspace, SubspaceSpec};
use rtsearch::realtime::{astar, lrta_star, tba_star, LssConfig, TbaConfig};
use rtsearch::stats::{aggregate, PerformanceAggregate};
use rtsearch::subgoal::{
    build_dlrta_db, build_hcdps_db, build_knn_db, solve_dlrta, solve_hcdps, solve_knn,
    HcdpsParams,
};
use rtsearch::{
    derive_seed, Cost, Error, Problem, Result, SearchSpace, Solution, StateId,
};

use crate::config::{Alg, ExperimentConfig, RunParams};

/// A solvable problem paired with its oracle cost.
#[derive(Clone, Copy, Debug)]
pub struct GeneratedProblem {
    pub problem: Problem,
    pub optimal_cost: Cost,
}

/// Uniformly random solvable problems with optimal cost at least
/// `min_optimal_cost`, verified against the optimal oracle. Each index
/// draws from its own derived seed stream, so the list is reproducible
/// regardless of worker count.
pub fn gen_problems(
    space: &SearchSpace<Cost>,
    count: usize,
    min_optimal_cost: f64,
    seed: u64,
) -> Result<Vec<GeneratedProblem>> {
    const DRAW_ATTEMPTS: usize = 1000;
    if count == 0 {
        return Err(Error::Usage("problem count must be positive".into()));
    }
    let n = space.num_states() as u32;
    if n < 2 {
        return Err(Error::Sampling("need at least 2 states to draw problems".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            for _ in 0..DRAW_ATTEMPTS {
                let start = StateId(rng.gen_range(0..n));
                let goal = StateId(rng.gen_range(0..n));
                if start == goal {
                    continue;
                }
                let problem = Problem::new(start, goal).expect("distinct endpoints");
                let (sol, _) = astar(space, problem);
                if sol.solved && sol.cost >= min_optimal_cost {
                    return Ok(GeneratedProblem { problem, optimal_cost: sol.cost });
                }
            }
            Err(Error::Sampling(format!(
                "no problem with optimal cost >= {min_optimal_cost} found in {DRAW_ATTEMPTS} draws"
            )))
        })
        .collect()
}

/// One algorithm's aggregate on one sub-space.
#[derive(Clone, Debug)]
pub struct AlgRow {
    pub alg: Alg,
    /// None when not a single problem was solved.
    pub agg: Option<PerformanceAggregate>,
    pub solved: usize,
    pub attempted: usize,
}

/// One per-problem, per-algorithm run record.
#[derive(Clone, Debug)]
pub struct ProblemRow {
    pub problem: usize,
    pub alg: Alg,
    pub cost: Option<Cost>,
    pub suboptimality: Option<f64>,
    pub expansions: u64,
    pub solved: bool,
}

/// Everything measured on one sub-space. Failures never abort the corpus;
/// they are recorded here and surface in the exit code.
#[derive(Clone, Debug)]
pub struct SpaceRun {
    pub space_id: String,
    pub num_states: usize,
    pub profile: Option<ComplexityProfile>,
    pub problems: Vec<GeneratedProblem>,
    pub rows: Vec<AlgRow>,
    pub problem_rows: Vec<ProblemRow>,
    /// Database build wall-times in seconds, by algorithm name; only
    /// populated when the config asks for timing.
    pub build_seconds: Vec<(Alg, f64)>,
    pub failures: Vec<String>,
}

pub struct RunOutput {
    pub runs: Vec<SpaceRun>,
}

impl RunOutput {
    pub fn any_failure(&self) -> bool {
        self.runs.iter().any(|r| !r.failures.is_empty())
    }
}

// Seed derivation: every sub-space draws everything it needs from
// (run seed, map index, sub index), so any single problem can be replayed
// in isolation. Offsets keep the four purposes in disjoint streams as long
// as there are at most 1000 sub-spaces per map (validated).
fn map_seed(run_seed: u64, map_index: usize) -> u64 {
    derive_seed(run_seed, map_index as u64)
}

fn subspace_seed(ms: u64, sub: usize) -> u64 {
    derive_seed(ms, 1_000 + sub as u64)
}

fn problems_seed(ms: u64, sub: usize) -> u64 {
    derive_seed(ms, 2_000 + sub as u64)
}

fn profile_seed(ms: u64, sub: usize) -> u64 {
    derive_seed(ms, 3_000 + sub as u64)
}

fn db_seed(ms: u64, sub: usize, alg: Alg) -> u64 {
    let k = Alg::ALL.iter().position(|&a| a == alg).expect("known algorithm") as u64;
    derive_seed(derive_seed(ms, 4_000 + sub as u64), k)
}

pub fn space_id(map_index: usize, label: &str, sub: usize) -> String {
    format!("m{map_index:02}-{label}/s{sub:02}")
}

fn step_cap(params: &RunParams, space: &SearchSpace<Cost>) -> usize {
    if params.step_cap > 0 {
        params.step_cap
    } else {
        100 * space.num_states().max(1)
    }
}

/// Carve sub-space `sub` of corpus entry `map_index` exactly as the
/// benchmark does. A sub-space size at or above the base size uses the
/// whole base space.
pub fn materialize_subspace(
    cfg: &ExperimentConfig,
    map_index: usize,
    sub: usize,
) -> Result<SearchSpace<Cost>> {
    let base = cfg.corpus[map_index].load()?;
    if cfg.subspace_size >= base.num_states() {
        return Ok(base);
    }
    let ms = map_seed(cfg.seed, map_index);
    let spec = SubspaceSpec::new(cfg.subspace_size, subspace_seed(ms, sub));
    sample_subspace(&base, &spec)
}

/// Solve one generated problem with one algorithm, using a prebuilt
/// database where the algorithm needs one.
fn run_problem(
    space: &SearchSpace<Cost>,
    db: &Database,
    p: Problem,
    params: &RunParams,
    cap: usize,
) -> Solution<Cost> {
    match db {
        Database::None(alg) => match alg {
            Alg::Lrta => lrta_star(space, p, LssConfig::new(params.lookahead, cap)),
            Alg::Tba => tba_star(space, p, TbaConfig::new(params.tba_expansions, cap)),
            _ => unreachable!("database algorithms carry their database"),
        },
        Database::Dlrta(db) => {
            solve_dlrta(space, db, p, LssConfig::new(params.lookahead, cap))
        }
        Database::Knn(db) => solve_knn(
            space,
            db,
            p,
            params.knn_neighbors,
            params.hc_bound,
            LssConfig::new(params.lookahead, cap),
        ),
        Database::Hcdps(db) => solve_hcdps(space, db, p, params.hc_bound, cap),
    }
}

enum Database {
    None(Alg),
    Dlrta(rtsearch::subgoal::DlrtaDatabase),
    Knn(rtsearch::subgoal::KnnDatabase),
    Hcdps(rtsearch::subgoal::HcdpsDatabase),
}

fn build_database(
    space: &SearchSpace<Cost>,
    alg: Alg,
    params: &RunParams,
    seed: u64,
) -> Result<Database> {
    Ok(match alg {
        Alg::Lrta | Alg::Tba => Database::None(alg),
        Alg::Dlrta => Database::Dlrta(build_dlrta_db(space, params.dlrta_levels, seed)),
        Alg::Knn => {
            Database::Knn(build_knn_db(space, params.knn_records, params.hc_bound, seed)?)
        }
        Alg::Hcdps => Database::Hcdps(build_hcdps_db(
            space,
            &HcdpsParams {
                hc_bound: params.hc_bound,
                link_radius: params.link_radius,
                max_regions: params.max_regions,
                seed,
            },
        )?),
    })
}

/// Run one already-materialized sub-space through profiling, problem
/// generation, and every enabled algorithm.
fn run_space(cfg: &ExperimentConfig, map_index: usize, sub: usize) -> SpaceRun {
    let id = space_id(map_index, &cfg.corpus[map_index].label(), sub);
    let mut run = SpaceRun {
        space_id: id,
        num_states: 0,
        profile: None,
        problems: Vec::new(),
        rows: Vec::new(),
        problem_rows: Vec::new(),
        build_seconds: Vec::new(),
        failures: Vec::new(),
    };
    let space = match materialize_subspace(cfg, map_index, sub) {
        Ok(s) => s,
        Err(e) => {
            run.failures.push(format!("sub-space sampling failed: {e}"));
            return run;
        }
    };
    run.num_states = space.num_states();
    let ms = map_seed(cfg.seed, map_index);
    run.profile =
        Some(profile(&space, &cfg.profile, cfg.params.hc_bound, profile_seed(ms, sub)));

    run.problems = match gen_problems(
        &space,
        cfg.problems_per_subspace,
        cfg.min_optimal_cost,
        problems_seed(ms, sub),
    ) {
        Ok(p) => p,
        Err(e) => {
            run.failures.push(format!("problem generation failed: {e}"));
            return run;
        }
    };

    let cap = step_cap(&cfg.params, &space);
    for &alg in &cfg.algorithms {
        let started = Instant::now();
        let db = match build_database(&space, alg, &cfg.params, db_seed(ms, sub, alg)) {
            Ok(db) => db,
            Err(e) => {
                run.failures.push(format!("{alg} database build failed: {e}"));
                run.rows.push(AlgRow {
                    alg,
                    agg: None,
                    solved: 0,
                    attempted: run.problems.len(),
                });
                continue;
            }
        };
        let build_time = started.elapsed().as_secs_f64();
        if cfg.measure_time && alg.has_database() {
            run.build_seconds.push((alg, build_time));
        }

        let solutions: Vec<Solution<Cost>> = run
            .problems
            .par_iter()
            .map(|gp| run_problem(&space, &db, gp.problem, &cfg.params, cap))
            .collect();

        let mut solved_subopts = Vec::new();
        for (i, (gp, sol)) in run.problems.iter().zip(&solutions).enumerate() {
            let subopt = sol
                .solved
                .then(|| sol.cost / gp.optimal_cost)
                .filter(|s| s.is_finite());
            if let Some(s) = subopt {
                solved_subopts.push(s);
            }
            run.problem_rows.push(ProblemRow {
                problem: i,
                alg,
                cost: sol.solved.then_some(sol.cost),
                suboptimality: subopt,
                expansions: sol.expansions,
                solved: sol.solved,
            });
        }
        let attempted = run.problems.len();
        let agg = match aggregate(&solved_subopts, attempted) {
            Ok(mut a) => {
                if cfg.measure_time && alg.has_database() {
                    a.mean_build_time = Some(build_time);
                }
                Some(a)
            }
            Err(_) => {
                run.failures.push(format!("{alg} solved 0 of {attempted} problems"));
                None
            }
        };
        run.rows.push(AlgRow { alg, agg, solved: solved_subopts.len(), attempted });
    }
    run
}

/// The whole pipeline. Sub-spaces run on the worker pool; results are
/// collected in (map index, sub index) order no matter which finishes
/// first, so outputs are identical across worker counts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    if cfg.subspaces_per_map > 1000 {
        return Err(Error::Usage("at most 1000 sub-spaces per map are supported".into()));
    }
    // fail fast on unloadable corpus entries — nothing can run without them
    for entry in &cfg.corpus {
        entry.load()?;
    }
    let units: Vec<(usize, usize)> = (0..cfg.corpus.len())
        .flat_map(|m| (0..cfg.subspaces_per_map).map(move |j| (m, j)))
        .collect();
    let runs: Vec<SpaceRun> =
        units.par_iter().map(|&(m, j)| run_space(cfg, m, j)).collect();
    Ok(RunOutput { runs })
}

/// Re-run a single problem from a finished experiment, identified by its
/// space id and problem index, reproducing the exact solution the
/// benchmark saw.
pub struct Replay {
    pub space_id: String,
    pub problem: GeneratedProblem,
    pub solution: Solution<Cost>,
}

pub fn replay(
    cfg: &ExperimentConfig,
    wanted_space: &str,
    problem_index: usize,
    alg: Alg,
) -> Result<Replay> {
    cfg.validate()?;
    let found = (0..cfg.corpus.len())
        .flat_map(|m| (0..cfg.subspaces_per_map).map(move |j| (m, j)))
        .find(|&(m, j)| space_id(m, &cfg.corpus[m].label(), j) == wanted_space);
    let (m, j) = found.ok_or_else(|| {
        Error::Usage(format!("space id `{wanted_space}` does not exist under this config"))
    })?;
    let space = materialize_subspace(cfg, m, j)?;
    let ms = map_seed(cfg.seed, m);
    let problems =
        gen_problems(&space, cfg.problems_per_subspace, cfg.min_optimal_cost, problems_seed(ms, j))?;
    let gp = *problems.get(problem_index).ok_or_else(|| {
        Error::Usage(format!(
            "problem index {problem_index} out of range (space has {})",
            problems.len()
        ))
    })?;
    let db = build_database(&space, alg, &cfg.params, db_seed(ms, j, alg))?;
    let cap = step_cap(&cfg.params, &space);
    let solution = run_problem(&space, &db, gp.problem, &cfg.params, cap);
    Ok(Replay { space_id: wanted_space.to_string(), problem: gp, solution })
}
