//! Deterministic CSV emission: profiles, per-algorithm performance,
//! per-problem records, rank correlations, and optional cross-validated
//! prediction reports.

use std::fmt::Write as _;
use std::fs;

use rtsearch::predict::{cross_validate, CvConfig, Dataset, ModelKind};
use rtsearch::stats::spearman;
use rtsearch::{Error, Result};

use crate::config::{Alg, ExperimentConfig};
use crate::experiment::{RunOutput, SpaceRun};

pub const MEASURE_NAMES: [&str; 8] = [
    "hc_region_size",
    "hc_probability",
    "scrubbing_complexity",
    "path_compressibility",
    "astar_difficulty",
    "heuristic_error",
    "depression_width",
    "depression_capacity",
];

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per sub-space: the eight measures with their sample counts.
pub fn profiles_csv(runs: &[SpaceRun]) -> String {
    let mut out = String::from("space_id,states");
    for name in MEASURE_NAMES {
        let _ = write!(out, ",{name},{name}_samples");
    }
    out.push('\n');
    for run in runs {
        let _ = write!(out, "{},{}", run.space_id, run.num_states);
        match &run.profile {
            Some(p) => {
                for (_, m) in p.named() {
                    let _ = write!(out, ",{},{}", m.value, m.samples);
                }
            }
            None => out.push_str(&",".repeat(16)),
        }
        out.push('\n');
    }
    out
}

/// One row per (sub-space, algorithm): aggregate performance plus the
/// database build time when timing was requested.
pub fn performance_csv(runs: &[SpaceRun]) -> String {
    let mut out = String::from(
        "space_id,algorithm,mean_suboptimality,median_suboptimality,solve_rate,build_seconds\n",
    );
    for run in runs {
        for row in &run.rows {
            let (mean, median, rate) = match &row.agg {
                Some(a) => (
                    a.mean_suboptimality.to_string(),
                    a.median_suboptimality.to_string(),
                    a.solve_rate.to_string(),
                ),
                None => (String::new(), String::new(), "0".into()),
            };
            let build = run
                .build_seconds
                .iter()
                .find(|(a, _)| *a == row.alg)
                .map(|(_, t)| t.to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{mean},{median},{rate},{build}",
                run.space_id,
                row.alg.name()
            );
        }
    }
    out
}

/// One row per (sub-space, problem, algorithm) run.
pub fn problems_csv(runs: &[SpaceRun]) -> String {
    let mut out = String::from(
        "space_id,problem,start,goal,optimal_cost,algorithm,cost,suboptimality,expansions,solved\n",
    );
    for run in runs {
        for pr in &run.problem_rows {
            let gp = &run.problems[pr.problem];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                run.space_id,
                pr.problem,
                gp.problem.start.0,
                gp.problem.goal.0,
                gp.optimal_cost,
                pr.alg.name(),
                fmt_opt(pr.cost),
                fmt_opt(pr.suboptimality),
                pr.expansions,
                pr.solved,
            );
        }
    }
    out
}

/// Measure values per sub-space, in [`MEASURE_NAMES`] order. Only spaces
/// whose full profile exists appear.
pub struct MeasureTable {
    pub rows: Vec<(String, Vec<f64>)>,
}

/// Mean suboptimality per (sub-space, algorithm), for the algorithms in
/// first-appearance order. Missing aggregates simply have no entry.
pub struct PerfTable {
    pub algs: Vec<String>,
    pub mean: std::collections::HashMap<(String, String), f64>,
}

fn tables_from_runs(runs: &[SpaceRun], algs: &[Alg]) -> (MeasureTable, PerfTable) {
    let rows = runs
        .iter()
        .filter_map(|run| {
            let p = run.profile.as_ref()?;
            Some((run.space_id.clone(), p.named().iter().map(|(_, m)| m.value).collect()))
        })
        .collect();
    let mut mean = std::collections::HashMap::new();
    for run in runs {
        for row in &run.rows {
            if let Some(agg) = &row.agg {
                mean.insert(
                    (run.space_id.clone(), row.alg.name().to_string()),
                    agg.mean_suboptimality,
                );
            }
        }
    }
    let algs = algs.iter().map(|a| a.name().to_string()).collect();
    (MeasureTable { rows }, PerfTable { algs, mean })
}

/// Read a `profiles.csv` body back into a measure table, skipping spaces
/// with empty measure cells (failed runs).
pub fn parse_profiles(text: &str) -> Result<MeasureTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty profiles file"))?;
    let cols: Vec<&str> = header.split(',').collect();
    let mut value_cols = Vec::new();
    for name in MEASURE_NAMES {
        let at = cols
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| parse_err(1, &format!("profiles header lacks `{name}`")))?;
        value_cols.push(at);
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(parse_err(i + 2, "ragged row"));
        }
        let mut values = Vec::with_capacity(8);
        for &c in &value_cols {
            match fields[c].parse::<f64>() {
                Ok(v) => values.push(v),
                Err(_) => break,
            }
        }
        if values.len() == 8 {
            rows.push((fields[0].to_string(), values));
        }
    }
    Ok(MeasureTable { rows })
}

/// Read a `performance.csv` body back into a per-algorithm table.
pub fn parse_performance(text: &str) -> Result<PerfTable> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "empty performance file"))?;
    let want = "space_id,algorithm,mean_suboptimality";
    if !header.starts_with(want) {
        return Err(parse_err(1, &format!("performance header must start `{want}`")));
    }
    let mut algs: Vec<String> = Vec::new();
    let mut mean = std::collections::HashMap::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(parse_err(i + 2, "ragged row"));
        }
        let alg = fields[1].to_string();
        if !algs.contains(&alg) {
            algs.push(alg.clone());
        }
        if let Ok(v) = fields[2].parse::<f64>() {
            mean.insert((fields[0].to_string(), alg), v);
        }
    }
    Ok(PerfTable { algs, mean })
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse { line, msg: msg.to_string() }
}

/// Spearman rank correlation of every measure against every algorithm's
/// mean suboptimality. Undefined correlations (constant columns, too few
/// spaces) leave rho and p empty.
pub fn correlations_from(measures: &MeasureTable, perf: &PerfTable) -> String {
    let mut out = String::from("axis1,axis2,rho,n,p,significant\n");
    for (mi, name) in MEASURE_NAMES.iter().enumerate() {
        for alg in &perf.algs {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (space, values) in &measures.rows {
                if let Some(&y) = perf.mean.get(&(space.clone(), alg.clone())) {
                    xs.push(values[mi]);
                    ys.push(y);
                }
            }
            match spearman(&xs, &ys) {
                Ok(c) => {
                    let _ = writeln!(
                        out,
                        "{name},{alg},{},{},{},{}",
                        c.rho, c.n, c.p, c.significant
                    );
                }
                Err(_) => {
                    let _ = writeln!(out, "{name},{alg},,{},,false", xs.len());
                }
            }
        }
    }
    out
}

pub fn correlations_csv(runs: &[SpaceRun], algs: &[Alg]) -> String {
    let (measures, perf) = tables_from_runs(runs, algs);
    correlations_from(&measures, &perf)
}

/// Cross-validated predictability of each algorithm's mean suboptimality
/// from the eight measures: baseline and least-squares models, both as
/// classifiers over equal-frequency bins and as regressors.
pub fn predictions_from(
    measures: &MeasureTable,
    perf: &PerfTable,
    folds: usize,
    bins: usize,
    seed: u64,
) -> String {
    let mut out = String::from("target,model,accuracy,rmse,rrse,rows\n");
    let kinds = [
        ("zero_r_classification", ModelKind::ZeroRClassification),
        ("ols_classification", ModelKind::OlsClassification),
        ("zero_r_regression", ModelKind::ZeroRRegression),
        ("ols_regression", ModelKind::OlsRegression),
    ];
    for alg in &perf.algs {
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for (space, values) in &measures.rows {
            if let Some(&y) = perf.mean.get(&(space.clone(), alg.clone())) {
                features.push(values.clone());
                targets.push(y);
            }
        }
        let n = targets.len();
        let data = match Dataset::new(features, targets) {
            Ok(d) => d,
            Err(_) => continue,
        };
        for (label, kind) in kinds {
            let cfg = CvConfig { folds, bins, seed };
            match cross_validate(&data, kind, &cfg) {
                Ok(rep) => {
                    let _ = writeln!(
                        out,
                        "{alg},{label},{},{},{},{n}",
                        fmt_opt(rep.accuracy),
                        fmt_opt(rep.rmse),
                        fmt_opt(rep.rrse),
                    );
                }
                Err(_) => {
                    let _ = writeln!(out, "{alg},{label},,,,{n}");
                }
            }
        }
    }
    out
}

pub fn predictions_csv(runs: &[SpaceRun], algs: &[Alg], seed: u64) -> String {
    let (measures, perf) = tables_from_runs(runs, algs);
    predictions_from(&measures, &perf, 10, 10, seed)
}

/// Per-space failure notes, one row each; empty file means a clean run.
pub fn failures_csv(runs: &[SpaceRun]) -> String {
    let mut out = String::from("space_id,failure\n");
    for run in runs {
        for f in &run.failures {
            // keep the CSV rectangular: the note is free text, so quote it
            let _ = writeln!(out, "{},\"{}\"", run.space_id, f.replace('"', "'"));
        }
    }
    out
}

/// Write the full report set into the config's output directory and return
/// the paths written.
pub fn write_reports(cfg: &ExperimentConfig, out: &RunOutput) -> Result<Vec<String>> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        Error::Build(format!("cannot create {}: {e}", cfg.output_dir.display()))
    })?;
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<()> {
        let path = cfg.output_dir.join(name);
        fs::write(&path, body)
            .map_err(|e| Error::Build(format!("cannot write {}: {e}", path.display())))?;
        written.push(path.display().to_string());
        Ok(())
    };
    emit("profiles.csv", profiles_csv(&out.runs))?;
    emit("performance.csv", performance_csv(&out.runs))?;
    emit("problems.csv", problems_csv(&out.runs))?;
    emit("correlations.csv", correlations_csv(&out.runs, &cfg.algorithms))?;
    if cfg.predict {
        emit("predictions.csv", predictions_csv(&out.runs, &cfg.algorithms, cfg.seed))?;
    }
    emit("failures.csv", failures_csv(&out.runs))?;
    emit("run_meta.txt", render_meta(cfg, out))?;
    Ok(written)
}

fn render_meta(cfg: &ExperimentConfig, out: &RunOutput) -> String {
    let mut meta = String::from("# experiment run metadata\n");
    meta.push_str(&cfg.render());
    let _ = writeln!(meta, "spaces = {}", out.runs.len());
    let failures: usize = out.runs.iter().map(|r| r.failures.len()).sum();
    let _ = writeln!(meta, "failures = {failures}");
    if cfg.measure_time {
        // machine identity only matters when wall-times are recorded; it is
        // also what makes two otherwise-identical runs differ, so it stays
        // out of untimed reports
        let _ = writeln!(meta, "os = {} {}", std::env::consts::OS, std::env::consts::ARCH);
        let _ = writeln!(meta, "workers = {}", rayon::current_num_threads());
    }
    meta
}
