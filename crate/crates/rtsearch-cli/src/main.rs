//! Command-line front end: map generation, sub-space sampling, complexity
//! profiling, database construction, single solves, and full benchmark runs
//! with correlation and prediction reports.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rtsearch::complexity::{profile, StabilityConfig};
use rtsearch::ingest::{generate_maze, sample_subspace, GridMap, SubspaceSpec};
use rtsearch::realtime::{astar, lrta_star, tba_star, LssConfig, TbaConfig};
use rtsearch::subgoal::{
    build_dlrta_db, build_hcdps_db, build_knn_db, solve_dlrta, solve_hcdps, solve_knn,
    HcdpsParams,
};
use rtsearch::{suboptimality, Cost, Error, Problem, SearchSpace, StateId};
use rtsearch_cli::config::{Alg, ExperimentConfig};
use rtsearch_cli::corpus::CorpusEntry;
use rtsearch_cli::{dbfile, experiment, report};

#[derive(Parser)]
#[command(
    name = "rtsearch",
    version,
    about = "Real-time heuristic search benchmarks: complexity measures, \
             subgoal databases, and performance prediction"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Where a search space comes from: either a grid-map file or an inline
/// corpus spec such as `open:64x64`, `maze:181x181:corridor=4:seed=7`,
/// `rooms:91x91:room=8:seed=3`, `map:PATH`, or `roads:GR,CO`.
#[derive(Args)]
struct InputArgs {
    /// Grid map file (shorthand for --spec map:PATH)
    #[arg(long, value_name = "PATH", conflicts_with = "spec")]
    map: Option<PathBuf>,
    /// Inline space spec
    #[arg(long, value_name = "SPEC")]
    spec: Option<String>,
}

impl InputArgs {
    fn entry(&self) -> Result<CorpusEntry, Error> {
        match (&self.map, &self.spec) {
            (Some(p), None) => Ok(CorpusEntry::MapFile(p.clone())),
            (None, Some(s)) => CorpusEntry::parse(s),
            _ => Err(Error::Usage("give exactly one of --map or --spec".into())),
        }
    }
}

/// Optional carve-out: profile or build against a connected sample of the
/// input instead of the whole space.
#[derive(Args)]
struct SampleArgs {
    /// Sample down to this many states first (0 keeps the whole space)
    #[arg(long, default_value_t = 0)]
    size: usize,
    /// Seed for the sample origin
    #[arg(long, default_value_t = 0)]
    sample_seed: u64,
}

impl SampleArgs {
    fn apply(&self, space: SearchSpace<Cost>) -> Result<SearchSpace<Cost>, Error> {
        if self.size == 0 || self.size >= space.num_states() {
            return Ok(space);
        }
        sample_subspace(&space, &SubspaceSpec::new(self.size, self.sample_seed))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a maze map and write it as a grid-map file
    GenMaze {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Corridor width (1, 2, 4, or 8)
        #[arg(long, default_value_t = 1)]
        corridor: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Carve a connected sample out of a grid map and write it as a new map
    /// with the unsampled cells closed off
    Sample {
        #[command(flatten)]
        input: InputArgs,
        /// Number of open cells the sample must contain
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Compute the eight complexity measures of a space
    Profile {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Hill-climbing cutoff used by the reachability measures
        #[arg(long, default_value_t = 250)]
        hc_bound: usize,
        #[arg(long, default_value_t = 100)]
        min_samples: usize,
        #[arg(long, default_value_t = 1000)]
        max_samples: usize,
        #[arg(long, default_value_t = 50)]
        window: usize,
        #[arg(long, default_value_t = 0.02)]
        rel_tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit one CSV row instead of the text table
        #[arg(long)]
        csv: bool,
    },
    /// Build a subgoal database and write it to a file
    BuildDb {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Database kind: dlrta, knn, or hcdps
        #[arg(long)]
        alg: String,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Abstraction levels (dlrta)
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// Number of stored records (knn)
        #[arg(long, default_value_t = 1000)]
        records: usize,
        /// Hill-climbing cutoff (knn, hcdps)
        #[arg(long, default_value_t = 250)]
        hc_bound: usize,
        /// Region-linking walk radius (hcdps)
        #[arg(long, default_value_t = 1)]
        link_radius: usize,
        /// Partition-growth cap (hcdps)
        #[arg(long, default_value_t = 5000)]
        max_regions: usize,
        /// Print how long the build took
        #[arg(long)]
        time: bool,
    },
    /// Solve one problem with a chosen algorithm
    Solve {
        #[command(flatten)]
        input: InputArgs,
        /// Algorithm: lrta, tba, dlrta, knn, or hcdps
        #[arg(long)]
        alg: String,
        /// Database file for dlrta/knn/hcdps (built with build-db)
        #[arg(long, value_name = "PATH")]
        db: Option<PathBuf>,
        /// Start state: `x,y` on grids or a bare state id
        #[arg(long)]
        start: String,
        /// Goal state: `x,y` on grids or a bare state id
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 1)]
        lookahead: usize,
        #[arg(long, default_value_t = 5)]
        tba_expansions: usize,
        #[arg(long, default_value_t = 10)]
        knn_neighbors: usize,
        #[arg(long, default_value_t = 250)]
        hc_bound: usize,
        /// Move budget (0 picks 100x the state count)
        #[arg(long, default_value_t = 0)]
        step_cap: usize,
    },
    /// Run a full benchmark experiment from a config file
    Bench {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Override a config key, e.g. --set seed=7 (repeatable)
        #[arg(long, value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 uses all cores)
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Recompute correlations.csv from an existing report directory
    Correlate {
        #[arg(long, value_name = "DIR")]
        dir: PathBuf,
    },
    /// Cross-validate performance predictors over an existing report
    /// directory and write predictions.csv
    Predict {
        #[arg(long, value_name = "DIR")]
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run one problem from a benchmark, reproducing it from seeds
    Replay {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Sub-space id as reported in the CSVs, e.g. m00-open100x100/s03
        #[arg(long)]
        space: String,
        /// Problem index within that sub-space
        #[arg(long)]
        problem: usize,
        #[arg(long)]
        alg: String,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(match e {
                Error::Usage(_) => 1,
                _ => 2,
            });
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::GenMaze { width, height, corridor, seed, out } => {
            let map = generate_maze(width, height, corridor, seed)?;
            write_file(&out, &map.emit())?;
            println!("wrote {}x{} maze ({} open cells) to {}", width, height, map.num_open(),
                     out.display());
            Ok(0)
        }
        Cmd::Sample { input, size, seed, out } => {
            let entry = input.entry()?;
            let grid = entry.grid()?.ok_or_else(|| {
                Error::Usage("sampling to a map file needs a grid input".into())
            })?;
            let space: SearchSpace<Cost> = grid.to_space();
            let members =
                rtsearch::ingest::sample_subspace_members(&space, &SubspaceSpec::new(size, seed))?;
            let mut open = vec![false; grid.width() * grid.height()];
            for &s in &members {
                let (x, y) = grid.cell(s);
                open[y as usize * grid.width() + x as usize] = true;
            }
            let carved = GridMap::from_cells(grid.width(), grid.height(), open)?;
            write_file(&out, &carved.emit())?;
            println!("sampled {} of {} cells into {}", members.len(), grid.num_open(),
                     out.display());
            Ok(0)
        }
        Cmd::Profile {
            input,
            sample,
            hc_bound,
            min_samples,
            max_samples,
            window,
            rel_tolerance,
            seed,
            csv,
        } => {
            let entry = input.entry()?;
            let space = sample.apply(entry.load()?)?;
            let stability = StabilityConfig { min_samples, max_samples, window, rel_tolerance };
            stability.validate()?;
            let prof = profile(&space, &stability, hc_bound, seed);
            if csv {
                let mut header = String::from("space_id,states");
                let mut row = format!("{},{}", entry.label(), space.num_states());
                for (name, m) in prof.named() {
                    header.push_str(&format!(",{name},{name}_samples"));
                    row.push_str(&format!(",{},{}", m.value, m.samples));
                }
                println!("{header}");
                println!("{row}");
            } else {
                println!("space {} ({} states)", entry.label(), space.num_states());
                for (name, m) in prof.named() {
                    let mark = if m.stable { "" } else { "  (not converged)" };
                    println!("  {name:<22} {:>12.6}  [{} samples]{mark}", m.value, m.samples);
                }
            }
            Ok(0)
        }
        Cmd::BuildDb {
            input,
            sample,
            alg,
            out,
            seed,
            levels,
            records,
            hc_bound,
            link_radius,
            max_regions,
            time,
        } => {
            let entry = input.entry()?;
            let space = sample.apply(entry.load()?)?;
            let started = Instant::now();
            let (db, note) = match alg.as_str() {
                "dlrta" => {
                    let db = build_dlrta_db(&space, levels, seed);
                    let note = format!("{} partitions, {} subgoal pairs", db.num_partitions,
                                       db.subgoals.len());
                    (dbfile::AnyDatabase::Dlrta(db), note)
                }
                "knn" => {
                    let db = build_knn_db(&space, records, hc_bound, seed)?;
                    let note = format!("{} records", db.records.len());
                    (dbfile::AnyDatabase::Knn(db), note)
                }
                "hcdps" => {
                    let params = HcdpsParams { hc_bound, link_radius, max_regions, seed };
                    let db = build_hcdps_db(&space, &params)?;
                    let note = format!("{} regions, {} records", db.seeds.len(),
                                       db.records.len());
                    (dbfile::AnyDatabase::Hcdps(db), note)
                }
                other => {
                    return Err(Error::Usage(format!(
                        "unknown database kind `{other}` (expected dlrta, knn, or hcdps)"
                    )))
                }
            };
            let elapsed = started.elapsed().as_secs_f64();
            dbfile::save(&out, &space, &db)?;
            print!("built {} database for {}: {note}", db.kind(), entry.label());
            if time {
                print!(" in {elapsed:.2}s");
            }
            println!("; wrote {}", out.display());
            Ok(0)
        }
        Cmd::Solve {
            input,
            alg,
            db,
            start,
            goal,
            lookahead,
            tba_expansions,
            knn_neighbors,
            hc_bound,
            step_cap,
        } => {
            let entry = input.entry()?;
            let space = entry.load()?;
            let grid = entry.grid()?;
            let problem = Problem {
                start: parse_state(&start, grid.as_ref(), &space)?,
                goal: parse_state(&goal, grid.as_ref(), &space)?,
            };
            let alg = Alg::from_str(&alg)?;
            if lookahead == 0 || tba_expansions == 0 || knn_neighbors == 0 || hc_bound == 0 {
                return Err(Error::Usage(
                    "lookahead, tba-expansions, knn-neighbors and hc-bound must be >= 1".into(),
                ));
            }
            let cap = if step_cap == 0 { 100 * space.num_states() } else { step_cap };
            let db = match (alg.has_database(), db) {
                (true, Some(path)) => Some(dbfile::load(&path, &space)?),
                (true, None) => {
                    return Err(Error::Usage(format!(
                        "algorithm `{}` needs --db (build one with build-db)",
                        alg.name()
                    )))
                }
                (false, Some(_)) => {
                    return Err(Error::Usage(format!(
                        "algorithm `{}` does not take a database",
                        alg.name()
                    )))
                }
                (false, None) => None,
            };
            let sol = match (alg, &db) {
                (Alg::Lrta, _) => lrta_star(&space, problem, LssConfig::new(lookahead, cap)),
                (Alg::Tba, _) => tba_star(&space, problem, TbaConfig::new(tba_expansions, cap)),
                (Alg::Dlrta, Some(dbfile::AnyDatabase::Dlrta(d))) => {
                    solve_dlrta(&space, d, problem, LssConfig::new(lookahead, cap))
                }
                (Alg::Knn, Some(dbfile::AnyDatabase::Knn(d))) => {
                    solve_knn(&space, d, problem, knn_neighbors, hc_bound,
                              LssConfig::new(lookahead, cap))
                }
                (Alg::Hcdps, Some(dbfile::AnyDatabase::Hcdps(d))) => {
                    solve_hcdps(&space, d, problem, hc_bound, cap)
                }
                (_, Some(other)) => {
                    return Err(Error::Usage(format!(
                        "database file holds a {} database, not {}",
                        other.kind(),
                        alg.name()
                    )))
                }
                _ => unreachable!("database presence checked above"),
            };
            print_solution(alg.name(), &sol);
            if sol.solved {
                let (reference, _) = astar(&space, problem);
                if reference.solved {
                    println!("optimal cost   {}", reference.cost);
                    println!("suboptimality  {}", suboptimality(sol.cost, reference.cost)?);
                }
            }
            Ok(if sol.solved { 0 } else { 3 })
        }
        Cmd::Bench { config, set, out_dir, seed, workers } => {
            if workers > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global()
                    .map_err(|e| Error::Usage(format!("cannot size worker pool: {e}")))?;
            }
            let cfg = load_config(&config, &set, out_dir, seed)?;
            let out = experiment::run_experiment(&cfg)?;
            let written = report::write_reports(&cfg, &out)?;
            for path in &written {
                println!("wrote {path}");
            }
            let failures: usize = out.runs.iter().map(|r| r.failures.len()).sum();
            if failures > 0 {
                eprintln!("{failures} space(s) had failures; see failures.csv");
                return Ok(3);
            }
            println!("{} sub-spaces, all clean", out.runs.len());
            Ok(0)
        }
        Cmd::Correlate { dir } => {
            let measures = report::parse_profiles(&read_file(&dir.join("profiles.csv"))?)?;
            let perf = report::parse_performance(&read_file(&dir.join("performance.csv"))?)?;
            let body = report::correlations_from(&measures, &perf);
            let path = dir.join("correlations.csv");
            write_file(&path, &body)?;
            println!("wrote {} ({} spaces)", path.display(), measures.rows.len());
            Ok(0)
        }
        Cmd::Predict { dir, bins, folds, seed } => {
            let measures = report::parse_profiles(&read_file(&dir.join("profiles.csv"))?)?;
            let perf = report::parse_performance(&read_file(&dir.join("performance.csv"))?)?;
            let body = report::predictions_from(&measures, &perf, folds, bins, seed);
            let path = dir.join("predictions.csv");
            write_file(&path, &body)?;
            println!("wrote {} ({} spaces)", path.display(), measures.rows.len());
            Ok(0)
        }
        Cmd::Replay { config, set, space, problem, alg } => {
            let cfg = load_config(&config, &set, None, None)?;
            let alg = Alg::from_str(&alg)?;
            let rep = experiment::replay(&cfg, &space, problem, alg)?;
            println!("space          {space}");
            println!("problem        {} -> {}", rep.problem.problem.start.0,
                     rep.problem.problem.goal.0);
            println!("optimal cost   {}", rep.problem.optimal_cost);
            print_solution(alg.name(), &rep.solution);
            if rep.solution.solved {
                println!("suboptimality  {}",
                         suboptimality(rep.solution.cost, rep.problem.optimal_cost)?);
            }
            Ok(if rep.solution.solved { 0 } else { 3 })
        }
    }
}

fn print_solution(alg: &str, sol: &rtsearch::Solution<Cost>) {
    println!("algorithm      {alg}");
    println!("outcome        {:?}", sol.outcome);
    if sol.solved {
        println!("cost           {}", sol.cost);
        println!("path length    {}", sol.path.len());
    }
    println!("expansions     {}", sol.expansions);
    if sol.heuristic_updates > 0 {
        println!("h updates      {}", sol.heuristic_updates);
    }
}

/// Accept `x,y` grid coordinates (when the input is a grid) or a bare
/// state id.
fn parse_state(
    text: &str,
    grid: Option<&GridMap>,
    space: &SearchSpace<Cost>,
) -> Result<StateId, Error> {
    let bad = |msg: String| Error::Usage(msg);
    if let Some((xs, ys)) = text.split_once(',') {
        let grid = grid.ok_or_else(|| {
            bad(format!("`{text}`: x,y coordinates only work on grid inputs"))
        })?;
        let x: usize = xs.trim().parse().map_err(|_| bad(format!("bad x in `{text}`")))?;
        let y: usize = ys.trim().parse().map_err(|_| bad(format!("bad y in `{text}`")))?;
        return grid
            .state_at(x, y)
            .ok_or_else(|| bad(format!("`{text}` is not an open cell")));
    }
    let id: usize = text.parse().map_err(|_| bad(format!("bad state id `{text}`")))?;
    if id >= space.num_states() {
        return Err(bad(format!("state {id} out of range ({} states)", space.num_states())));
    }
    Ok(StateId(id as u32))
}

fn load_config(
    path: &Path,
    sets: &[String],
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::parse(&read_file(path)?)?;
    for pair in sets {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::Usage(format!("--set wants KEY=VALUE, got `{pair}`"))
        })?;
        cfg.apply(key.trim(), value.trim())
            .map_err(|e| Error::Usage(format!("--set {pair}: {e}")))?;
    }
    if let Some(dir) = out_dir {
        cfg.output_dir = dir;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })
}

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                Error::Build(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    std::fs::write(path, body)
        .map_err(|e| Error::Build(format!("cannot write {}: {e}", path.display())))
}
