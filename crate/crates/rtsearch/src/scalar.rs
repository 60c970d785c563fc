use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Tolerance under which two accumulated costs count as equal. Sums of the
/// same edge multiset differ by a few ulp depending on addition order (the
/// 1.4 diagonal is not a binary fraction), so ordering decisions quantize
/// to this granularity before comparing; genuinely different grid costs are
/// at least 0.2 apart and can never land in one bucket.
pub const COST_EPS: f64 = 1e-6;

/// Bucket index used for tolerant cost ordering; total and transitive,
/// unlike a pairwise epsilon comparison.
#[inline]
pub(crate) fn cost_bucket<S: Scalar>(v: S) -> i64 {
    (v.f64() / COST_EPS).round() as i64
}

/// Floating-point scalar for edge costs and heuristic values.
///
/// Spaces, solvers and databases are generic over this so that very large
/// graphs can be held with `f32` edges; the crate-root `Cost` alias (`f64`)
/// is what the CLI and every experiment runs with. Coordinates always stay
/// `f64` — road coordinates are large integers and would shred `f32`
/// precision — only derived costs pass through the scalar.
pub trait Scalar:
    num_traits::Float
    + num_traits::float::FloatCore
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Cast a finite `f64` (cost literal or computed distance) into the scalar.
    #[inline]
    fn of(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("finite f64 fits cost scalar")
    }

    /// Widen back to `f64` for statistics.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("cost scalar fits f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
