use rayon::prelude::*;

use super::profile::{classify_profile, Shape};
use super::table::{sweep_fields, SweepTable};
use super::AnalysisError;
use crate::grid::ScalarField;
use crate::scenario::{power_growth, Fields};
use crate::solver::SolverOptions;

/// Exponents shown for the power family by default.
pub const DEFAULT_LAMBDAS: [f64; 6] = [-1.0, 0.0, 0.5, 1.0, 1.4, 2.3];

/// Sweeps `d` for every exponent in `lambdas`, in parallel across exponents.
pub fn lambda_sweep(
    k: &ScalarField,
    p: &ScalarField,
    alpha: f64,
    lambdas: &[f64],
    d_grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<(f64, SweepTable)>, AnalysisError> {
    if lambdas.is_empty() {
        return Err(AnalysisError::Inconsistent("empty lambda list".into()));
    }
    if let Some(&bad) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(AnalysisError::Inconsistent(format!("lambda {bad} is not finite")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(AnalysisError::Inconsistent("alpha must be positive".into()));
    }
    lambdas
        .par_iter()
        .map(|&lambda| {
            let fields = Fields {
                k: k.clone(),
                p: p.clone(),
                r: power_growth(k, p, alpha, lambda),
            };
            let results = sweep_fields(&fields, d_grid, opts).map_err(|e| match e {
                AnalysisError::Solver(source) => AnalysisError::LambdaSweep {
                    lambda,
                    source: Box::new(source),
                },
                other => other,
            })?;
            let name = format!("lambda={lambda}");
            let table = SweepTable::from_results(&name, &fields, Some(lambda), d_grid, &results)?;
            Ok((lambda, table))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSummaryRow {
    pub lambda: f64,
    pub m_infinity: f64,
    pub max_m: f64,
    pub argmax_d: f64,
    pub shape: Shape,
}

pub fn summarize(tables: &[(f64, SweepTable)]) -> Result<Vec<LambdaSummaryRow>, AnalysisError> {
    tables
        .iter()
        .map(|(lambda, t)| {
            let profile = classify_profile(t)?;
            let max_m = t.m_values().into_iter().fold(f64::NEG_INFINITY, f64::max);
            Ok(LambdaSummaryRow {
                lambda: *lambda,
                m_infinity: t.m_infinity,
                max_m,
                argmax_d: profile.argmax_d,
                shape: profile.shape,
            })
        })
        .collect()
}

/// What a set of positive exponents says about a critical `λ*` separating
/// profiles with a maximum at finite `d` from increasing ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalLambdaProbe {
    /// Largest exponent whose profile peaks at an interior `d`.
    pub last_interior_max: Option<f64>,
    /// Smallest exponent whose profile increases over the whole range.
    pub first_increasing: Option<f64>,
    /// Whether every peaked profile lies below every increasing one, so that
    /// a single threshold separates them.
    pub consistent: bool,
    /// Whether the largest `M` over the sweep never decreases along `λ`.
    pub max_m_nondecreasing: bool,
}

pub fn critical_lambda_probe(summary: &[LambdaSummaryRow]) -> CriticalLambdaProbe {
    let mut rows: Vec<&LambdaSummaryRow> = summary.iter().filter(|r| r.lambda > 0.0).collect();
    rows.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let peaked = |s: Shape| matches!(s, Shape::UnimodalMax | Shape::Multimodal);
    let last_interior_max = rows.iter().rev().find(|r| peaked(r.shape)).map(|r| r.lambda);
    let first_increasing = rows
        .iter()
        .find(|r| r.shape == Shape::Increasing)
        .map(|r| r.lambda);
    let consistent = rows.iter().all(|r| peaked(r.shape) || r.shape == Shape::Increasing)
        && match (last_interior_max, first_increasing) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        };
    let mut all: Vec<&LambdaSummaryRow> = summary.iter().collect();
    all.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let max_m_nondecreasing = all.windows(2).all(|w| w[1].max_m >= w[0].max_m);
    CriticalLambdaProbe {
        last_interior_max,
        first_increasing,
        consistent,
        max_m_nondecreasing,
    }
}
