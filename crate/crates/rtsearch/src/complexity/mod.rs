//! Search-space complexity measures and the stability-driven profile.

mod depression;
mod measures;
mod profile;

pub use depression::{find_depressions, Depression, DepressionAnalysis};
pub use measures::{
    measure_astar_difficulty, measure_depression_capacity, measure_depression_width,
    measure_hc_probability, measure_hc_region_size, measure_heuristic_error,
    measure_path_compressibility, measure_scrubbing, DEFAULT_HC_BOUND,
};
pub use profile::{profile, ComplexityProfile, MeasureValue, StabilityConfig};
