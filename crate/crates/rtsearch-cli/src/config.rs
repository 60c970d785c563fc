//! Key = value experiment configuration, merged from an optional file plus
//! command-line overrides (overrides win).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rtsearch::complexity::StabilityConfig;
use rtsearch::{Error, Result};

use crate::corpus::CorpusEntry;

/// Per-algorithm knobs: lookahead depth d, TBA* per-move expansion budget R,
/// abstraction depth for the partition database, record/neighbor counts for
/// the nearest-neighbor database, region link radius r, the global
/// hill-climbing cutoff b, and the move cap (0 = 100 moves per state).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunParams {
    pub lookahead: usize,
    pub tba_expansions: usize,
    pub dlrta_levels: usize,
    pub knn_records: usize,
    pub knn_neighbors: usize,
    pub link_radius: usize,
    pub hc_bound: usize,
    pub max_regions: usize,
    pub step_cap: usize,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            lookahead: 1,
            tba_expansions: 5,
            dlrta_levels: 5,
            knn_records: 1000,
            knn_neighbors: 10,
            link_radius: 1,
            hc_bound: 250,
            max_regions: 5000,
            step_cap: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Alg {
    Lrta,
    Tba,
    Dlrta,
    Knn,
    Hcdps,
}

impl Alg {
    pub const ALL: [Alg; 5] = [Alg::Lrta, Alg::Tba, Alg::Dlrta, Alg::Knn, Alg::Hcdps];

    pub fn name(self) -> &'static str {
        match self {
            Alg::Lrta => "lrta",
            Alg::Tba => "tba",
            Alg::Dlrta => "dlrta",
            Alg::Knn => "knn",
            Alg::Hcdps => "hcdps",
        }
    }

    /// Whether runs need an offline-built database.
    pub fn has_database(self) -> bool {
        matches!(self, Alg::Dlrta | Alg::Knn | Alg::Hcdps)
    }
}

impl FromStr for Alg {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lrta" => Ok(Alg::Lrta),
            "tba" => Ok(Alg::Tba),
            "dlrta" => Ok(Alg::Dlrta),
            "knn" => Ok(Alg::Knn),
            "hcdps" => Ok(Alg::Hcdps),
            other => Err(Error::Usage(format!(
                "unknown algorithm `{other}` (expected lrta, tba, dlrta, knn, hcdps)"
            ))),
        }
    }
}

impl fmt::Display for Alg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub corpus: Vec<CorpusEntry>,
    pub subspaces_per_map: usize,
    pub subspace_size: usize,
    pub problems_per_subspace: usize,
    pub min_optimal_cost: f64,
    pub algorithms: Vec<Alg>,
    pub params: RunParams,
    pub profile: StabilityConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Record database build wall-times. Off by default so identical runs
    /// produce byte-identical outputs.
    pub measure_time: bool,
    /// Emit cross-validated prediction reports alongside correlations.
    pub predict: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            corpus: Vec::new(),
            subspaces_per_map: 10,
            subspace_size: 20000,
            problems_per_subspace: 250,
            min_optimal_cost: 10.0,
            algorithms: Alg::ALL.to_vec(),
            params: RunParams::default(),
            profile: StabilityConfig::default(),
            seed: 0,
            output_dir: PathBuf::from("out"),
            measure_time: false,
            predict: false,
        }
    }
}

impl ExperimentConfig {
    /// Parse a config file body. Lines are `key = value`; `#` starts a
    /// comment; `corpus` lines accumulate.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key = value, got `{stripped}`"),
            })?;
            cfg.apply(key.trim(), value.trim())
                .map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        }
        Ok(cfg)
    }

    /// Set one key, as written in a config file or a `--set` override.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Usage(format!("{key}: `{value}` is not a valid number")))
        }
        match key {
            "corpus" => self.corpus.push(CorpusEntry::parse(value)?),
            "subspaces_per_map" => self.subspaces_per_map = num(key, value)?,
            "subspace_size" => self.subspace_size = num(key, value)?,
            "problems_per_subspace" => self.problems_per_subspace = num(key, value)?,
            "min_optimal_cost" => self.min_optimal_cost = num(key, value)?,
            "algorithms" => {
                let algs: Result<Vec<Alg>> = value.split(',').map(str::parse).collect();
                self.algorithms = algs?;
            }
            "lookahead" => self.params.lookahead = num(key, value)?,
            "tba_expansions" => self.params.tba_expansions = num(key, value)?,
            "dlrta_levels" => self.params.dlrta_levels = num(key, value)?,
            "knn_records" => self.params.knn_records = num(key, value)?,
            "knn_neighbors" => self.params.knn_neighbors = num(key, value)?,
            "link_radius" => self.params.link_radius = num(key, value)?,
            "hc_bound" => self.params.hc_bound = num(key, value)?,
            "max_regions" => self.params.max_regions = num(key, value)?,
            "step_cap" => self.params.step_cap = num(key, value)?,
            "profile_min_samples" => self.profile.min_samples = num(key, value)?,
            "profile_max_samples" => self.profile.max_samples = num(key, value)?,
            "profile_window" => self.profile.window = num(key, value)?,
            "profile_rel_tolerance" => self.profile.rel_tolerance = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "measure_time" => self.measure_time = parse_bool(key, value)?,
            "predict" => self.predict = parse_bool(key, value)?,
            _ => return Err(Error::Usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Everything a benchmark run needs, present and positive.
    pub fn validate(&self) -> Result<()> {
        if self.corpus.is_empty() {
            return Err(Error::Usage("config needs at least one corpus entry".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Usage("config needs at least one algorithm".into()));
        }
        let positive = [
            ("subspaces_per_map", self.subspaces_per_map),
            ("subspace_size", self.subspace_size),
            ("problems_per_subspace", self.problems_per_subspace),
            ("lookahead", self.params.lookahead),
            ("tba_expansions", self.params.tba_expansions),
            ("dlrta_levels", self.params.dlrta_levels),
            ("knn_records", self.params.knn_records),
            ("knn_neighbors", self.params.knn_neighbors),
            ("link_radius", self.params.link_radius),
            ("hc_bound", self.params.hc_bound),
            ("max_regions", self.params.max_regions),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Usage(format!("{name} must be positive")));
            }
        }
        if self.min_optimal_cost < 0.0 {
            return Err(Error::Usage("min_optimal_cost must be non-negative".into()));
        }
        self.profile.validate()?;
        Ok(())
    }

    /// Canonical `key = value` rendering, used for the run metadata echo.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for entry in &self.corpus {
            out.push_str(&format!("corpus = {}\n", entry.label()));
        }
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        out.push_str(&format!(
            "subspaces_per_map = {}\nsubspace_size = {}\nproblems_per_subspace = {}\n\
             min_optimal_cost = {}\nalgorithms = {}\nlookahead = {}\ntba_expansions = {}\n\
             dlrta_levels = {}\nknn_records = {}\nknn_neighbors = {}\nlink_radius = {}\n\
             hc_bound = {}\nmax_regions = {}\nstep_cap = {}\nprofile_min_samples = {}\n\
             profile_max_samples = {}\nprofile_window = {}\nprofile_rel_tolerance = {}\n\
             seed = {}\nmeasure_time = {}\npredict = {}\n",
            self.subspaces_per_map,
            self.subspace_size,
            self.problems_per_subspace,
            self.min_optimal_cost,
            algs.join(","),
            self.params.lookahead,
            self.params.tba_expansions,
            self.params.dlrta_levels,
            self.params.knn_records,
            self.params.knn_neighbors,
            self.params.link_radius,
            self.params.hc_bound,
            self.params.max_regions,
            self.params.step_cap,
            self.profile.min_samples,
            self.profile.max_samples,
            self.profile.window,
            self.profile.rel_tolerance,
            self.seed,
            self.measure_time,
            self.predict,
        ));
        out
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Usage(format!("{key}: `{value}` is not a boolean"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_parse_with_comments_and_accumulate_corpus() {
        let cfg = ExperimentConfig::parse(
            "# benchmark\n\
             corpus = open:64x64\n\
             corpus = maze:91x91:corridor=2:seed=4  # second map\n\
             subspace_size = 5000\n\
             algorithms = lrta,tba\n\
             seed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.corpus.len(), 2);
        assert_eq!(cfg.subspace_size, 5000);
        assert_eq!(cfg.algorithms, vec![Alg::Lrta, Alg::Tba]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.problems_per_subspace, 250);
        cfg.validate().unwrap();
    }

    #[test]
    fn bad_lines_report_their_line_number() {
        let err = ExperimentConfig::parse("corpus = open:8x8\nnot a pair\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
        let err = ExperimentConfig::parse("subspace_size = many\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = ExperimentConfig::parse("flux_capacitance = 3\n").unwrap_err();
        assert!(err.to_string().contains("unknown config key"));
    }

    #[test]
    fn overrides_win_and_validation_catches_zeroes() {
        let mut cfg = ExperimentConfig::parse("corpus = open:8x8\nseed = 1\n").unwrap();
        cfg.apply("seed", "7").unwrap();
        assert_eq!(cfg.seed, 7);
        cfg.apply("problems_per_subspace", "0").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_carry_the_reference_parameters() {
        let p = RunParams::default();
        assert_eq!(
            (p.lookahead, p.tba_expansions, p.dlrta_levels, p.knn_records, p.knn_neighbors),
            (1, 5, 5, 1000, 10)
        );
        assert_eq!((p.link_radius, p.hc_bound), (1, 250));
    }
}
