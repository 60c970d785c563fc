//! Stability-driven sampling: every measure keeps drawing samples until its
//! running mean stops moving, then the profile reports the mean over all
//! samples drawn, the sample count, and whether stability was reached.

use rayon::prelude::*;

use crate::complexity::measures::{
    assert_has_connected_pair, components, sample_astar_difficulty, sample_compressibility,
    sample_depressions, sample_hc_probability, sample_heuristic_error, sample_region_size,
    sample_scrubbing, sample_seed, TAG_ASTAR_DIFFICULTY, TAG_COMPRESSIBILITY,
    TAG_DEPRESSION_CAPACITY, TAG_DEPRESSION_WIDTH, TAG_HC_PROBABILITY, TAG_HEURISTIC_ERROR,
    TAG_REGION_SIZE, TAG_SCRUBBING,
};
use crate::error::{Error, Result};
use crate::realtime::LssConfig;
use crate::scalar::Scalar;
use crate::space::SearchSpace;

/// When to stop sampling a measure.
#[derive(Clone, Copy, Debug)]
pub struct StabilityConfig {
    pub min_samples: usize,
    pub max_samples: usize,
    /// The running mean is compared against itself this many samples back.
    pub window: usize,
    pub rel_tolerance: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig { min_samples: 100, max_samples: 1000, window: 50, rel_tolerance: 0.02 }
    }
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples > self.max_samples {
            return Err(Error::Usage(format!(
                "min samples {} exceeds max {}",
                self.min_samples, self.max_samples
            )));
        }
        if self.window == 0 {
            return Err(Error::Usage("window must be at least 1".into()));
        }
        if self.rel_tolerance <= 0.0 {
            return Err(Error::Usage("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One sampled measure: its mean, how many samples that took, whether the
/// mean settled within tolerance, and how many runs hit their step cap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub samples: usize,
    pub stable: bool,
    pub unsolved: usize,
}

/// All eight measures for one space under one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityProfile {
    pub hc_region_size: MeasureValue,
    pub hc_probability: MeasureValue,
    pub scrubbing_complexity: MeasureValue,
    pub path_compressibility: MeasureValue,
    pub astar_difficulty: MeasureValue,
    pub heuristic_error: MeasureValue,
    pub depression_width: MeasureValue,
    pub depression_capacity: MeasureValue,
    pub seed: u64,
}

impl ComplexityProfile {
    /// The eight values in canonical order, paired with their names.
    pub fn named(&self) -> [(&'static str, &MeasureValue); 8] {
        [
            ("hc_region_size", &self.hc_region_size),
            ("hc_probability", &self.hc_probability),
            ("scrubbing_complexity", &self.scrubbing_complexity),
            ("path_compressibility", &self.path_compressibility),
            ("astar_difficulty", &self.astar_difficulty),
            ("heuristic_error", &self.heuristic_error),
            ("depression_width", &self.depression_width),
            ("depression_capacity", &self.depression_capacity),
        ]
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Draw `window`-sized batches (each batch parallel, merged in index order)
/// until the running mean moves less than the relative tolerance across one
/// window, within [min_samples, max_samples].
fn run_measure<F>(stability: &StabilityConfig, kernel: F) -> MeasureValue
where
    F: Fn(u64) -> (f64, bool) + Sync,
{
    let mut values: Vec<f64> = Vec::new();
    let mut unsolved = 0usize;
    let mut stable = false;
    while values.len() < stability.max_samples {
        let batch = stability.window.min(stability.max_samples - values.len());
        let start = values.len() as u64;
        let fresh: Vec<(f64, bool)> =
            (0..batch as u64).into_par_iter().map(|j| kernel(start + j)).collect();
        for (v, flagged) in fresh {
            values.push(v);
            unsolved += flagged as usize;
        }
        let k = values.len();
        if k >= stability.min_samples && k >= 2 * stability.window {
            let now = mean(&values);
            let before = mean(&values[..k - stability.window]);
            if (now - before).abs() <= stability.rel_tolerance * now.abs() {
                stable = true;
                break;
            }
        }
    }
    MeasureValue { value: mean(&values), samples: values.len(), stable, unsolved }
}

/// Compute all eight measures for one space. Learning runs use distance-one
/// lookahead with the conventional step cap; `hc_bound` caps hill-climbing
/// walks for the region, reachability and compression measures.
pub fn profile<S: Scalar>(
    space: &SearchSpace<S>,
    stability: &StabilityConfig,
    hc_bound: usize,
    seed: u64,
) -> ComplexityProfile {
    stability.validate().expect("stability config invalid");
    let comp = components(space);
    assert_has_connected_pair(&comp);
    let cfg = LssConfig::for_space(1, space);

    let hc_region_size = run_measure(stability, |i| {
        (sample_region_size(space, hc_bound, sample_seed(seed, TAG_REGION_SIZE, i)), false)
    });
    let hc_probability = run_measure(stability, |i| {
        (sample_hc_probability(space, hc_bound, sample_seed(seed, TAG_HC_PROBABILITY, i)), false)
    });
    let scrubbing_complexity = run_measure(stability, |i| {
        sample_scrubbing(space, &comp, cfg, sample_seed(seed, TAG_SCRUBBING, i))
    });
    let path_compressibility = run_measure(stability, |i| {
        (
            sample_compressibility(space, &comp, hc_bound, sample_seed(seed, TAG_COMPRESSIBILITY, i)),
            false,
        )
    });
    let astar_difficulty = run_measure(stability, |i| {
        (sample_astar_difficulty(space, &comp, sample_seed(seed, TAG_ASTAR_DIFFICULTY, i)), false)
    });
    let heuristic_error = run_measure(stability, |i| {
        (sample_heuristic_error(space, sample_seed(seed, TAG_HEURISTIC_ERROR, i)), false)
    });
    let depression_width = run_measure(stability, |i| {
        (sample_depressions(space, sample_seed(seed, TAG_DEPRESSION_WIDTH, i)).0, false)
    });
    let depression_capacity = run_measure(stability, |i| {
        (sample_depressions(space, sample_seed(seed, TAG_DEPRESSION_CAPACITY, i)).1, false)
    });

    ComplexityProfile {
        hc_region_size,
        hc_probability,
        scrubbing_complexity,
        path_compressibility,
        astar_difficulty,
        heuristic_error,
        depression_width,
        depression_capacity,
        seed,
    }
}
