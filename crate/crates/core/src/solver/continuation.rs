use super::{newton_solve, pseudo_transient, Problem, SolveResult, SolverError, SolverOptions};
use crate::grid::ScalarField;

/// Solves on every `d` of an ascending grid.
///
/// The first point starts from `u = K`; each later point warm-starts from
/// the previous solution. Newton runs first and the pseudo-transient march
/// takes over when it fails.
pub fn continuation_sweep(
    k: &ScalarField,
    p: &ScalarField,
    r: &ScalarField,
    d_grid: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<SolveResult>, SolverError> {
    if d_grid.is_empty() {
        return Err(SolverError::InvalidProblem("empty d grid".into()));
    }
    if d_grid.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
        return Err(SolverError::InvalidProblem(
            "every d must be finite and positive".into(),
        ));
    }
    if d_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolverError::InvalidProblem(
            "d grid must be strictly increasing".into(),
        ));
    }

    let base = Problem::new(d_grid[0], k.clone(), p.clone(), r.clone())?;
    let mut results: Vec<SolveResult> = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        let problem = base.with_d(d)?;
        let start = results.last().map_or(k, |prev| &prev.u);
        let solved = match newton_solve(&problem, start, opts) {
            Ok(res) => Ok(res),
            Err(_) => pseudo_transient(&problem, start, opts),
        };
        match solved {
            Ok(res) => results.push(res),
            Err(source) => {
                return Err(SolverError::SweepFailure {
                    d,
                    source: Box::new(source),
                })
            }
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inf_norm_diff, integrate, GridSpec};
    use std::f64::consts::PI;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn manufactured_solution_is_exact_on_every_d() {
        let g = GridSpec::unit(256).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let sweep =
            continuation_sweep(&k, &k, &k, &log_grid(-4.0, 4.0, 17), &SolverOptions::default())
                .unwrap();
        for res in &sweep {
            assert!(inf_norm_diff(&res.u, &k).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn constant_growth_rate_stays_below_total_capacity() {
        let g = GridSpec::unit(256).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let pf = ScalarField::from_fn(g, |x| 2.0 - (2.0 * PI * x).cos());
        let r = ScalarField::constant(g, 1.0);
        let int_k = integrate(&k);
        let sweep =
            continuation_sweep(&k, &pf, &r, &log_grid(-4.0, 4.0, 17), &SolverOptions::default())
                .unwrap();
        assert!(sweep.iter().all(|s| s.converged && integrate(&s.u) < int_k));
    }

    #[test]
    fn rejects_bad_d_grids() {
        let g = GridSpec::unit(16).unwrap();
        let k = ScalarField::constant(g, 1.0);
        let opts = SolverOptions::default();
        assert!(continuation_sweep(&k, &k, &k, &[1.0, 0.5], &opts).is_err());
        assert!(continuation_sweep(&k, &k, &k, &[0.0, 0.5], &opts).is_err());
        assert!(continuation_sweep(&k, &k, &k, &[], &opts).is_err());
    }
}
