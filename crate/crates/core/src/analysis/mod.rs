//! Functionals of the steady states, sweep tables, profile classification
//! and per-claim verdicts.

mod functionals;
pub mod hypotheses;
mod lambda;
mod profile;
mod table;
mod verdict;

use thiserror::Error;

use crate::scenario::ScenarioError;
use crate::solver::SolverError;

pub use functionals::{
    beta_limit, correlation_band, correlation_integral, m_infinity, total_population,
    weighted_moments, WeightedMoments,
};
pub use lambda::{
    critical_lambda_probe, lambda_sweep, summarize, CriticalLambdaProbe,
    LambdaSummaryRow, DEFAULT_LAMBDAS,
};
pub use profile::{classify_profile, classify_values, ProfileClass, Shape, SLOPE_RTOL};
pub use table::{run_sweep, SweepRow, SweepRun, SweepTable};
pub use verdict::{
    resolve_relations, verdicts, ClaimId, Hypothesis, Sign, Verdict, VerdictReport, LAMBDA_GRID,
    LIMIT_RTOL, QUADRATURE_MARGIN,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("profile classification needs at least 5 rows, got {got}")]
    TooFewPoints { got: usize },
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("sweep for lambda={lambda} failed: {source}")]
    LambdaSweep {
        lambda: f64,
        #[source]
        source: Box<SolverError>,
    },
}

/// Sweeps a scenario and evaluates every claim on it.
pub fn verify_scenario(
    scenario: &crate::scenario::Scenario,
) -> Result<(SweepRun, Vec<VerdictReport>), AnalysisError> {
    let run = run_sweep(scenario)?;
    let reports = verdicts(scenario, &run.table, &run.results[..2], &run.fields)?;
    Ok((run, reports))
}
