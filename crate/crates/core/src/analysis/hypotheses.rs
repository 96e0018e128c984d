//! Numerical detectors for the structural hypotheses of the claims checked in
//! [`verdicts`](super::verdicts). Fields come from sampled analytic expressions, so a
//! true hypothesis holds to roundoff and the tolerances are tight.

use crate::grid::ScalarField;
use crate::scenario::{Correlation, RatioTrend};

pub const PROPORTIONAL_RTOL: f64 = 1e-10;
pub const CONSTANT_RTOL: f64 = 1e-12;

/// Largest relative deviation of `f` from its nodal mean.
pub fn deviation_from_mean(f: &ScalarField) -> f64 {
    let v = f.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().fold(0.0_f64, |m, x| m.max((x - mean).abs())) / mean.abs()
}

/// `a = c b` for some constant `c`.
pub fn proportional(a: &ScalarField, b: &ScalarField) -> bool {
    deviation_from_mean(&(a / b)) <= PROPORTIONAL_RTOL
}

pub fn is_constant(f: &ScalarField) -> bool {
    f.relative_range() <= CONSTANT_RTOL
}

fn strict_direction(v: &[f64]) -> Option<f64> {
    let first = v.get(1)? - v[0];
    if first == 0.0 {
        return None;
    }
    let s = first.signum();
    v.windows(2)
        .all(|w| (w[1] - w[0]) * s > 0.0)
        .then_some(s)
}

/// Sign of the dependence of `follower` on `driver` when `driver` is
/// strictly monotone along the grid, so that `follower = h(driver)` for some
/// function `h`. `None` when `driver` is not monotone or `h` is not.
pub fn monotone_correlation(driver: &ScalarField, follower: &ScalarField) -> Option<Correlation> {
    match trend_along(driver, follower)? {
        RatioTrend::Increasing => Some(Correlation::Positive),
        RatioTrend::Decreasing => Some(Correlation::Negative),
        RatioTrend::Constant => None,
    }
}

/// Trend of `P/K` along `K` when `K` is strictly monotone on the grid.
pub fn ratio_trend(k: &ScalarField, p: &ScalarField) -> Option<RatioTrend> {
    trend_along(k, &(p / k))
}

fn trend_along(driver: &ScalarField, follower: &ScalarField) -> Option<RatioTrend> {
    let dir = strict_direction(driver.values())?;
    let tol = CONSTANT_RTOL * follower.sup_norm();
    let steps: Vec<f64> = follower
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]) * dir)
        .collect();
    if steps.iter().all(|s| s.abs() <= tol) {
        Some(RatioTrend::Constant)
    } else if steps.iter().all(|&s| s > tol) {
        Some(RatioTrend::Increasing)
    } else if steps.iter().all(|&s| s < -tol) {
        Some(RatioTrend::Decreasing)
    } else {
        None
    }
}
