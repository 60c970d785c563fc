//! Performance prediction from complexity profiles: equal-frequency target
//! discretization, baseline and least-squares models, and seeded k-fold
//! cross-validation reporting accuracy, RMSE and RRSE.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Feature rows (fixed arity) with one real target each.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if features.len() != targets.len() {
            return Err(Error::Usage(format!(
                "{} feature rows but {} targets",
                features.len(),
                targets.len()
            )));
        }
        let arity = features.first().map(Vec::len).unwrap_or(0);
        for (i, row) in features.iter().enumerate() {
            if row.len() != arity {
                return Err(Error::Usage(format!(
                    "row {i} has {} features, expected {arity}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Usage(format!("row {i} has a non-finite feature")));
            }
        }
        if let Some(i) = targets.iter().position(|t| !t.is_finite()) {
            return Err(Error::Usage(format!("target {i} is not finite")));
        }
        Ok(Dataset { features, targets })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.features.first().map(Vec::len).unwrap_or(0)
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// Equal-frequency discretization of training targets. Boundaries are
/// midpoints at the order-statistic cuts; indistinguishable boundaries are
/// merged, so `effective_k` can be below the requested k on duplicate-heavy
/// data.
#[derive(Clone, Debug, PartialEq)]
pub struct BinScheme {
    boundaries: Vec<f64>,
}

impl BinScheme {
    pub fn effective_k(&self) -> usize {
        self.boundaries.len() + 1
    }

    /// 0-based bin index; values equal to a boundary fall in the lower bin.
    pub fn bin_of(&self, v: f64) -> usize {
        self.boundaries.partition_point(|b| *b < v)
    }
}

pub fn equal_freq_bins(values: &[f64], k: usize) -> Result<BinScheme> {
    if k < 2 {
        return Err(Error::Usage(format!("need at least 2 bins, got {k}")));
    }
    let n = values.len();
    if n < k {
        return Err(Error::Usage(format!("{n} values cannot fill {k} bins")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("bin values must be finite"));
    let mut distinct = 1;
    for w in sorted.windows(2) {
        distinct += (w[0] != w[1]) as usize;
    }
    if distinct < k {
        return Err(Error::DegenerateBins(format!(
            "only {distinct} distinct values for {k} bins"
        )));
    }
    // a cut inside a duplicate block slides to the nearest strict value gap
    // so boundaries always fall between distinct values, never on one
    let gap_at = |pos: usize| sorted[pos - 1] < sorted[pos];
    let mut boundaries = Vec::with_capacity(k - 1);
    for i in 1..k {
        let pos = ((i * n) as f64 / k as f64).round() as usize;
        let pos = pos.clamp(1, n - 1);
        let pos = (0..n)
            .flat_map(|d| [pos.checked_sub(d), pos.checked_add(d)])
            .flatten()
            .find(|&p| (1..n).contains(&p) && gap_at(p))
            .expect("distinct >= k guarantees a gap");
        boundaries.push((sorted[pos - 1] + sorted[pos]) / 2.0);
    }
    boundaries.dedup();
    if boundaries.is_empty() {
        return Err(Error::DegenerateBins(
            "duplicate values merged every boundary away".into(),
        ));
    }
    Ok(BinScheme { boundaries })
}

/// Least-squares fit with intercept; the returned coefficients are
/// `[intercept, per-feature...]`. Singular designs get the minimum-norm
/// solution via SVD.
pub fn ols_regression(features: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>> {
    if features.len() != targets.len() || features.is_empty() {
        return Err(Error::Usage("regression needs matching, non-empty rows".into()));
    }
    let n = features.len();
    let m = features[0].len();
    let mut flat = Vec::with_capacity(n * (m + 1));
    for row in features {
        flat.push(1.0);
        flat.extend_from_slice(row);
    }
    let x = DMatrix::from_row_slice(n, m + 1, &flat);
    let y = DVector::from_column_slice(targets);
    let beta = x
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::Usage(format!("least squares failed: {e}")))?;
    Ok(beta.iter().copied().collect())
}

pub fn predict_linear(coefficients: &[f64], features: &[f64]) -> f64 {
    debug_assert_eq!(coefficients.len(), features.len() + 1);
    coefficients[0]
        + coefficients[1..].iter().zip(features).map(|(c, f)| c * f).sum::<f64>()
}

/// Mean of the training targets — the no-information regression baseline.
pub fn zero_r_mean(targets: &[f64]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::Usage("baseline needs at least one target".into()));
    }
    Ok(targets.iter().sum::<f64>() / targets.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Constant first-bin classifier.
    ZeroRClassification,
    /// Constant training-mean regressor.
    ZeroRRegression,
    /// Least squares on all features.
    OlsRegression,
    /// Least squares, then the prediction is discretized through the
    /// training fold's bins.
    OlsClassification,
}

impl ModelKind {
    pub fn is_classification(self) -> bool {
        matches!(self, ModelKind::ZeroRClassification | ModelKind::OlsClassification)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CvConfig {
    pub folds: usize,
    /// Equal-frequency bin count for classification kinds.
    pub bins: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig { folds: 10, bins: 10, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldStats {
    pub n_test: usize,
    pub sse_model: f64,
    /// Squared error of the training-mean baseline on the same test rows.
    pub sse_baseline: f64,
    pub correct: usize,
}

#[derive(Clone, Debug)]
pub struct EvalReport {
    pub kind: ModelKind,
    /// Percent of test rows classified into the right bin.
    pub accuracy: Option<f64>,
    pub rmse: Option<f64>,
    /// Percent root-square error relative to the baseline; 100 for the
    /// baseline itself by construction.
    pub rrse: Option<f64>,
    pub folds: Vec<FoldStats>,
}

/// Seeded shuffle, balanced contiguous folds, train-on-rest/test-on-one.
/// Bin schemes for classification are refit on each training fold alone.
pub fn cross_validate(data: &Dataset, kind: ModelKind, cfg: &CvConfig) -> Result<EvalReport> {
    let n = data.len();
    if cfg.folds < 2 || cfg.folds > n {
        return Err(Error::Usage(format!(
            "{} folds impossible with {n} rows",
            cfg.folds
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    order.shuffle(&mut rng);

    let fold_stats: Vec<Result<FoldStats>> = (0..cfg.folds)
        .into_par_iter()
        .map(|f| {
            let lo = f * n / cfg.folds;
            let hi = (f + 1) * n / cfg.folds;
            let test = &order[lo..hi];
            let train: Vec<usize> =
                order[..lo].iter().chain(&order[hi..]).copied().collect();
            run_fold(data, kind, cfg, &train, test)
        })
        .collect();

    let mut folds = Vec::with_capacity(cfg.folds);
    for s in fold_stats {
        folds.push(s?);
    }
    let n_test: usize = folds.iter().map(|f| f.n_test).sum();
    debug_assert_eq!(n_test, n, "folds must partition the rows");
    let sse_model: f64 = folds.iter().map(|f| f.sse_model).sum();
    let sse_baseline: f64 = folds.iter().map(|f| f.sse_baseline).sum();

    let (accuracy, rmse, rrse) = if kind.is_classification() {
        let correct: usize = folds.iter().map(|f| f.correct).sum();
        (Some(100.0 * correct as f64 / n as f64), None, None)
    } else {
        let rmse = (sse_model / n as f64).sqrt();
        let rrse = match kind {
            ModelKind::ZeroRRegression => Some(100.0),
            _ if sse_baseline > 0.0 => Some(100.0 * (sse_model / sse_baseline).sqrt()),
            _ => None,
        };
        (None, Some(rmse), rrse)
    };
    Ok(EvalReport { kind, accuracy, rmse, rrse, folds })
}

fn run_fold(
    data: &Dataset,
    kind: ModelKind,
    cfg: &CvConfig,
    train: &[usize],
    test: &[usize],
) -> Result<FoldStats> {
    let train_features: Vec<Vec<f64>> =
        train.iter().map(|&i| data.features[i].clone()).collect();
    let train_targets: Vec<f64> = train.iter().map(|&i| data.targets[i]).collect();
    let baseline = zero_r_mean(&train_targets)?;

    let mut stats = FoldStats { n_test: test.len(), sse_model: 0.0, sse_baseline: 0.0, correct: 0 };
    match kind {
        ModelKind::ZeroRRegression | ModelKind::OlsRegression => {
            let coeffs = if kind == ModelKind::OlsRegression {
                Some(ols_regression(&train_features, &train_targets)?)
            } else {
                None
            };
            for &i in test {
                let actual = data.targets[i];
                let predicted = match &coeffs {
                    Some(c) => predict_linear(c, &data.features[i]),
                    None => baseline,
                };
                stats.sse_model += (predicted - actual) * (predicted - actual);
                stats.sse_baseline += (baseline - actual) * (baseline - actual);
            }
        }
        ModelKind::ZeroRClassification | ModelKind::OlsClassification => {
            let scheme = equal_freq_bins(&train_targets, cfg.bins)?;
            let coeffs = if kind == ModelKind::OlsClassification {
                Some(ols_regression(&train_features, &train_targets)?)
            } else {
                None
            };
            for &i in test {
                let label = scheme.bin_of(data.targets[i]);
                let predicted = match &coeffs {
                    Some(c) => scheme.bin_of(predict_linear(c, &data.features[i])),
                    None => 0,
                };
                stats.correct += (predicted == label) as usize;
            }
        }
    }
    Ok(stats)
}

/// Database-size prediction: rows carry the complexity measures plus the
/// desired performance as features and the database size as target. Returns
/// the informed classifier (6 equal-frequency size classes) and regressor
/// alongside both baselines.
#[derive(Clone, Debug)]
pub struct DbSizePrediction {
    pub classification: EvalReport,
    pub regression: EvalReport,
    pub baseline_classification: EvalReport,
    pub baseline_regression: EvalReport,
}

pub fn predict_db_size(data: &Dataset, seed: u64) -> Result<DbSizePrediction> {
    let cfg = CvConfig { folds: 10, bins: 6, seed };
    Ok(DbSizePrediction {
        classification: cross_validate(data, ModelKind::OlsClassification, &cfg)?,
        regression: cross_validate(data, ModelKind::OlsRegression, &cfg)?,
        baseline_classification: cross_validate(data, ModelKind::ZeroRClassification, &cfg)?,
        baseline_regression: cross_validate(data, ModelKind::ZeroRRegression, &cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn one_value_per_bin_and_deciles() {
        let ten: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = equal_freq_bins(&ten, 10).unwrap();
        assert_eq!(s.effective_k(), 10);
        let mut counts = vec![0usize; 10];
        for v in &ten {
            counts[s.bin_of(*v)] += 1;
        }
        assert_eq!(counts, vec![1; 10]);

        let hundred: Vec<f64> = (1..=100).map(f64::from).collect();
        let s = equal_freq_bins(&hundred, 10).unwrap();
        let mut counts = vec![0usize; 10];
        for v in &hundred {
            counts[s.bin_of(*v)] += 1;
        }
        assert_eq!(counts, vec![10; 10]);
    }

    #[test]
    fn binning_rejects_degenerate_and_merges_duplicates() {
        assert!(matches!(
            equal_freq_bins(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0], 3),
            Err(Error::DegenerateBins(_))
        ));
        assert!(equal_freq_bins(&[1.0, 2.0], 3).is_err());
        // distinct count suffices but a duplicate block swallows boundaries
        let vals = [1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 3.0, 4.0, 5.0];
        let s = equal_freq_bins(&vals, 5).unwrap();
        assert_eq!(s.effective_k(), 4);
        assert_eq!(s.bin_of(1.0), 0);
        assert_eq!(s.bin_of(2.0), 1, "the duplicate block lands in one bin");
        assert_eq!(s.bin_of(3.0), 2);
        assert_eq!(s.bin_of(4.0), 3);
        assert_eq!(s.bin_of(5.0), 3);
    }

    #[test]
    fn baselines_are_constant() {
        assert_eq!(zero_r_mean(&[2.0, 4.0]).unwrap(), 3.0);
        assert!(zero_r_mean(&[]).is_err());
    }

    #[test]
    fn exact_linear_data_fits_perfectly() {
        // quadratic spacing keeps held-out targets a unit away from any
        // training-fold boundary, so tiny solver noise cannot flip a bin
        let features: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let targets: Vec<f64> = features.iter().map(|r| r[1] - 2.0 * r[0] + 7.0).collect();
        let data = Dataset::new(features, targets).unwrap();
        let cfg = CvConfig { folds: 10, bins: 10, seed: 1 };
        let rep = cross_validate(&data, ModelKind::OlsRegression, &cfg).unwrap();
        assert!(rep.rmse.unwrap() < 1e-8, "rmse {}", rep.rmse.unwrap());
        assert!(rep.rrse.unwrap() < 1e-6);
        let cls = cross_validate(&data, ModelKind::OlsClassification, &cfg).unwrap();
        assert_eq!(cls.accuracy.unwrap(), 100.0);
    }

    #[test]
    fn constant_targets_reduce_least_squares_to_the_mean() {
        let features: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, (3 * i % 7) as f64]).collect();
        let targets = vec![5.0; 12];
        let coeffs = ols_regression(&features, &targets).unwrap();
        for row in &features {
            assert!((predict_linear(&coeffs, row) - 5.0).abs() < 1e-8);
        }
    }

    #[test]
    fn noisy_linear_recovery_lands_near_the_noise_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = 0.2;
        let spread = sigma * 3f64.sqrt(); // uniform on [-a, a] has std a/sqrt(3)
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..50 {
            let f0 = rng.gen_range(-5.0..5.0);
            let f1 = rng.gen_range(0.0..10.0);
            features.push(vec![f0, f1]);
            targets.push(2.0 * f0 - f1 + 0.5 + rng.gen_range(-spread..spread));
        }
        let data = Dataset::new(features, targets).unwrap();
        let rep = cross_validate(&data, ModelKind::OlsRegression, &CvConfig::default()).unwrap();
        let rmse = rep.rmse.unwrap();
        assert!(
            (0.5 * sigma..1.5 * sigma).contains(&rmse),
            "rmse {rmse} not within the noise floor around {sigma}"
        );
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let features: Vec<Vec<f64>> =
            (0..20).map(|i| vec![(i as f64).sin(), i as f64, (i % 5) as f64]).collect();
        let targets: Vec<f64> =
            features.iter().enumerate().map(|(i, r)| r[0] - 2.0 * r[2] + (i % 3) as f64).collect();
        let coeffs = ols_regression(&features, &targets).unwrap();
        // accumulate X^T r and X^T y including the intercept column
        let mut xtr = vec![0.0; 4];
        let mut xty = vec![0.0; 4];
        for (row, &y) in features.iter().zip(&targets) {
            let r = y - predict_linear(&coeffs, row);
            let cols = [1.0, row[0], row[1], row[2]];
            for (j, c) in cols.iter().enumerate() {
                xtr[j] += c * r;
                xty[j] += c * y;
            }
        }
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(norm(&xtr) <= 1e-8 * norm(&xty).max(1.0));
    }

    #[test]
    fn baseline_rrse_is_exactly_one_hundred() {
        let features: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        let targets: Vec<f64> = (0..40).map(|i| ((i * 13) % 17) as f64).collect();
        let data = Dataset::new(features, targets).unwrap();
        let rep = cross_validate(&data, ModelKind::ZeroRRegression, &CvConfig::default()).unwrap();
        assert_eq!(rep.rrse, Some(100.0));
        assert!(rep.rmse.unwrap() > 0.0);
    }

    #[test]
    fn folds_partition_all_rows() {
        let features: Vec<Vec<f64>> = (0..23).map(|i| vec![i as f64]).collect();
        let targets: Vec<f64> = (0..23).map(|i| i as f64 * 0.7).collect();
        let data = Dataset::new(features, targets).unwrap();
        let rep = cross_validate(&data, ModelKind::ZeroRRegression, &CvConfig::default()).unwrap();
        assert_eq!(rep.folds.len(), 10);
        assert_eq!(rep.folds.iter().map(|f| f.n_test).sum::<usize>(), 23);
        for f in &rep.folds {
            assert!((2..=3).contains(&f.n_test));
        }
        assert!(cross_validate(
            &data,
            ModelKind::ZeroRRegression,
            &CvConfig { folds: 24, bins: 10, seed: 0 }
        )
        .is_err());
    }

    #[test]
    fn uninformed_classifier_sits_near_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let features: Vec<Vec<f64>> = (0..200).map(|_| vec![rng.gen_range(0.0..1.0)]).collect();
        let mut targets: Vec<f64> = (0..200).map(f64::from).collect();
        targets.shuffle(&mut rng);
        let data = Dataset::new(features, targets).unwrap();
        let rep =
            cross_validate(&data, ModelKind::ZeroRClassification, &CvConfig::default()).unwrap();
        let acc = rep.accuracy.unwrap();
        assert!((4.0..16.0).contains(&acc), "chance-level accuracy expected, got {acc}");
    }

    #[test]
    fn size_prediction_beats_its_baseline_on_monotone_data() {
        // synthetic corpus: 60 spaces x 6 database sizes; solver quality
        // improves with size, modulated by a per-space difficulty
        let sizes: [f64; 6] = [500.0, 1000.0, 2500.0, 5000.0, 10000.0, 20000.0];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut features = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..60 {
            let difficulty = rng.gen_range(0.5..3.0);
            let measures: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..1.0)).collect();
            for &size in &sizes {
                let subopt = 1.0 + difficulty * (20000.0 / size).sqrt() * 0.05
                    + rng.gen_range(-0.01..0.01);
                let mut row = measures.clone();
                row.push(subopt);
                features.push(row);
                targets.push(size);
            }
        }
        let data = Dataset::new(features, targets).unwrap();
        let pred = predict_db_size(&data, 2).unwrap();
        let base_acc = pred.baseline_classification.accuracy.unwrap();
        assert!(
            (10.0..24.0).contains(&base_acc),
            "six-class chance should sit near 16.67, got {base_acc}"
        );
        assert_eq!(pred.baseline_regression.rrse, Some(100.0));
        assert!(pred.regression.rrse.unwrap() < 100.0);
        assert!(pred.classification.accuracy.unwrap() > base_acc);
    }
}
