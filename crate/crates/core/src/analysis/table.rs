use super::functionals::{beta_limit, m_infinity, total_population};
use super::AnalysisError;
use crate::grid::integrate;
use crate::scenario::{Fields, Scenario};
use crate::solver::{continuation_sweep, Method, SolveResult, SolverOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: f64,
    pub m: f64,
    pub m_minus_int_k: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: Method,
}

/// Total population over an ascending `d` grid together with the reference
/// levels `∫K`, `β` and the fast-dispersal limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub name: String,
    pub lambda: Option<f64>,
    pub int_k: f64,
    pub beta: f64,
    pub m_infinity: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Builds the table from converged results, one per `d`.
    ///
    /// `lambda` selects the power-family formula for the fast-dispersal
    /// limit; otherwise it is `β ∫P`.
    pub fn from_results(
        name: &str,
        fields: &Fields,
        lambda: Option<f64>,
        d_grid: &[f64],
        results: &[SolveResult],
    ) -> Result<Self, AnalysisError> {
        if d_grid.len() != results.len() {
            return Err(AnalysisError::Inconsistent(format!(
                "{} d values for {} results",
                d_grid.len(),
                results.len()
            )));
        }
        if d_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AnalysisError::Inconsistent(
                "d values must be strictly increasing".into(),
            ));
        }
        if let Some(i) = results.iter().position(|r| !r.converged) {
            return Err(AnalysisError::Inconsistent(format!(
                "result at d={} did not converge",
                d_grid[i]
            )));
        }
        let Fields { k, p, r } = fields;
        let int_k = integrate(k);
        let beta = beta_limit(r, k, p);
        let m_inf = match lambda {
            Some(l) => m_infinity(l, k, p),
            None => beta * integrate(p),
        };
        let rows = d_grid
            .iter()
            .zip(results)
            .map(|(&d, res)| {
                let m = total_population(&res.u);
                SweepRow {
                    d,
                    m,
                    m_minus_int_k: m - int_k,
                    iterations: res.iterations,
                    residual: res.residual_norm,
                    method: res.method,
                }
            })
            .collect();
        Ok(Self {
            name: name.to_string(),
            lambda,
            int_k,
            beta,
            m_infinity: m_inf,
            rows,
        })
    }

    pub fn d_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.d).collect()
    }

    pub fn m_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m).collect()
    }

    /// Index of the row with the largest `M` (first one on ties).
    pub fn argmax(&self) -> Option<usize> {
        self.rows
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, row)| match best {
                Some((_, m)) if m >= row.m => best,
                _ => Some((i, row.m)),
            })
            .map(|(i, _)| i)
    }
}

/// A scenario swept over its whole `d` grid.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub fields: Fields,
    pub results: Vec<SolveResult>,
    pub table: SweepTable,
}

/// Samples the scenario and runs the continuation sweep.
pub fn run_sweep(scenario: &Scenario) -> Result<SweepRun, AnalysisError> {
    let fields = scenario.fields()?;
    let d_grid = scenario.d_values();
    let results = sweep_fields(&fields, &d_grid, &scenario.opts)?;
    let table = SweepTable::from_results(
        &scenario.name,
        &fields,
        scenario.lambda(),
        &d_grid,
        &results,
    )?;
    Ok(SweepRun {
        fields,
        results,
        table,
    })
}

pub(crate) fn sweep_fields(
    fields: &Fields,
    d_grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<SolveResult>, AnalysisError> {
    Ok(continuation_sweep(
        &fields.k, &fields.p, &fields.r, d_grid, opts,
    )?)
}
