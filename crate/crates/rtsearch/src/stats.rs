//! Rank correlation with significance, plus solver-performance aggregation.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Spearman rank correlation with a two-tailed significance estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationResult {
    pub rho: f64,
    /// t statistic of the approximation; infinite for |rho| = 1.
    pub t: f64,
    /// Two-tailed p from the t approximation with n-2 degrees of freedom.
    pub p: f64,
    pub n: usize,
    /// p ≤ 0.05
    pub significant: bool,
}

/// Solver quality over one batch of problems. Unsolved runs carry no
/// suboptimality, so they only lower the solve rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerformanceAggregate {
    pub mean_suboptimality: f64,
    pub median_suboptimality: f64,
    pub solve_rate: f64,
    /// Mean offline construction time in seconds, where the solver has a
    /// database at all; filled in by the experiment layer.
    pub mean_build_time: Option<f64>,
}

/// 1-based fractional ranks: tied values share the average of the positions
/// they jointly occupy.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("ranks need finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[idx[j]] == values[idx[i]] {
            j += 1;
        }
        // positions i+1 ..= j averaged
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "an input has zero rank variance (constant list)".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman correlation: Pearson over fractional ranks (identical to the
/// classic 1 - 6Σd²/(n(n²-1)) form when there are no ties).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::Usage(format!(
            "correlation inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Usage(format!("correlation needs at least 3 points, got {n}")));
    }
    let rho = pearson(&fractional_ranks(x), &fractional_ranks(y))?;
    let (t, p) = if rho.abs() >= 1.0 {
        (f64::INFINITY.copysign(rho), 0.0)
    } else {
        let t = rho * ((n as f64 - 2.0) / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, n as f64 - 2.0).expect("df >= 1");
        (t, 2.0 * (1.0 - dist.cdf(t.abs())))
    };
    Ok(CorrelationResult { rho, t, p, n, significant: p <= 0.05 })
}

/// Exact two-tailed permutation p for the observed |rho|: the fraction of
/// all orderings of `y` whose |rho| is at least as extreme. Factorial cost,
/// so n is capped at 10.
pub fn permutation_p(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    assert!(n <= 10, "exact permutation test is factorial; n must be <= 10");
    let observed = spearman(x, y)?.rho.abs();
    let rx = fractional_ranks(x);
    let mut ry = fractional_ranks(y);
    let mut hits = 0u64;
    let mut total = 0u64;
    // Heap's algorithm over the rank vector
    let mut c = vec![0usize; n];
    let mut count = |ranks: &[f64]| {
        total += 1;
        if pearson(&rx, ranks).map(|r| r.abs() + 1e-12 >= observed).unwrap_or(false) {
            hits += 1;
        }
    };
    count(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            count(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// Summarize solved-run suboptimalities against the number attempted.
pub fn aggregate(solved: &[f64], attempted: usize) -> Result<PerformanceAggregate> {
    if solved.is_empty() {
        return Err(Error::Usage("no solved runs to aggregate".into()));
    }
    if attempted < solved.len() {
        return Err(Error::Usage(format!(
            "attempted count {} is below the {} solved runs",
            attempted,
            solved.len()
        )));
    }
    let mut sorted = solved.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("suboptimalities are finite"));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    };
    Ok(PerformanceAggregate {
        mean_suboptimality: solved.iter().sum::<f64>() / solved.len() as f64,
        median_suboptimality: median,
        solve_rate: solved.len() as f64 / attempted as f64,
        mean_build_time: None,
    })
}

/// Pairwise Spearman over columns; undefined cells (constant columns) are
/// None.
pub fn correlation_table(columns: &[Vec<f64>]) -> Vec<Vec<Option<CorrelationResult>>> {
    columns
        .iter()
        .map(|a| columns.iter().map(|b| spearman(a, b).ok()).collect())
        .collect()
}

/// Magnitude bin of |rho|: [0,0.25) → 0, [0.25,0.5) → 1, [0.5,0.75) → 2,
/// [0.75,1] → 3.
pub fn magnitude_bin(rho_abs: f64) -> usize {
    assert!((0.0..=1.0 + 1e-12).contains(&rho_abs), "|rho| out of range: {rho_abs}");
    match rho_abs {
        v if v < 0.25 => 0,
        v if v < 0.5 => 1,
        v if v < 0.75 => 2,
        _ => 3,
    }
}
