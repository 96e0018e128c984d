use super::{
    jacobian, residual, residual_floor, FailureCause, Method, Problem, SolveResult, SolverError,
    SolverOptions,
};
use crate::grid::ScalarField;

fn axpy(u: &ScalarField, s: f64, delta: &[f64]) -> ScalarField {
    let values = u
        .values()
        .iter()
        .zip(delta)
        .map(|(a, b)| a + s * b)
        .collect();
    ScalarField::new(*u.grid(), values).expect("Newton update stays on the grid")
}

/// Damped Newton iteration from a strictly positive start.
///
/// Each step solves `J δ = -F` and halves the step length until the sup
/// norm of the residual decreases and the iterate stays positive. When the
/// residual has reached its roundoff floor (see [`residual_floor`]) but not
/// `newton_tol`, one undamped polishing step is taken and the result is
/// reported as converged.
pub fn newton_solve(
    p: &Problem,
    u0: &ScalarField,
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    opts.validate()?;
    p.check_start(u0)?;

    let fail = |cause, iterations, residual| SolverError::NoConvergence {
        method: Method::Newton,
        cause,
        iterations,
        residual,
    };
    let done = |u: ScalarField, iterations, residual_norm, tolerance| SolveResult {
        u,
        iterations,
        residual_norm,
        tolerance,
        converged: true,
        method: Method::Newton,
    };

    let mut u = u0.clone();
    let mut f = residual(&u, p);
    let mut f_norm = f.sup_norm();
    for it in 0..opts.max_newton_iters {
        if f_norm <= opts.newton_tol {
            return Ok(done(u, it, f_norm, opts.newton_tol));
        }
        let tol = opts.newton_tol.max(residual_floor(&u, p));
        let rhs: Vec<f64> = f.values().iter().map(|v| -v).collect();
        let delta = jacobian(&u, p)
            .thomas_solve(&rhs)
            .map_err(|_| fail(FailureCause::SingularJacobian, it, f_norm))?;

        if f_norm <= tol {
            let polished = axpy(&u, 1.0, &delta);
            if polished.min() > 0.0 {
                let fp = residual(&polished, p);
                let fp_norm = fp.sup_norm();
                if fp_norm <= tol {
                    return Ok(done(polished, it + 1, fp_norm, tol));
                }
            }
            return Ok(done(u, it, f_norm, tol));
        }

        let mut step = 1.0;
        loop {
            let trial = axpy(&u, step, &delta);
            if trial.min() > 0.0 {
                let ft = residual(&trial, p);
                let ft_norm = ft.sup_norm();
                if ft_norm < f_norm {
                    u = trial;
                    f = ft;
                    f_norm = ft_norm;
                    break;
                }
            }
            step *= 0.5;
            if step < opts.min_damping {
                return Err(fail(FailureCause::DampingTooSmall, it, f_norm));
            }
        }
    }

    let tol = opts.newton_tol.max(residual_floor(&u, p));
    if f_norm <= tol {
        Ok(done(u, opts.max_newton_iters, f_norm, tol))
    } else {
        Err(fail(
            FailureCause::IterationsExhausted,
            opts.max_newton_iters,
            f_norm,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inf_norm_diff, integrate, GridSpec};
    use std::f64::consts::PI;

    #[test]
    fn recovers_carrying_capacity_when_p_equals_k() {
        let g = GridSpec::unit(512).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let r = k.clone();
        let p = Problem::new(1.0, k.clone(), k.clone(), r).unwrap();
        let res = newton_solve(&p, &k.scale(1.3), &SolverOptions::default()).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 5, "{} iterations", res.iterations);
        assert!(inf_norm_diff(&res.u, &k).unwrap() <= 1e-10);
    }

    #[test]
    fn proportional_growth_rate_raises_total_population() {
        let g = GridSpec::unit(512).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let pf = ScalarField::from_fn(g, |x| 2.0 - (2.0 * PI * x).cos());
        let r = &k / &pf;
        let p = Problem::new(1.0, k.clone(), pf, r).unwrap();
        let res = newton_solve(&p, &k, &SolverOptions::default()).unwrap();
        assert!(integrate(&res.u) > 2.0);
    }

    #[test]
    fn slow_diffusion_stays_within_linear_bound() {
        let g = GridSpec::unit(512).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let pf = ScalarField::from_fn(g, |x| 2.0 - (2.0 * PI * x).cos());
        let r = &k / &pf;
        let d = 1e-4;
        let p = Problem::new(d, k.clone(), pf.clone(), r.clone()).unwrap();
        let res = newton_solve(&p, &k, &SolverOptions::default()).unwrap();
        let dev = inf_norm_diff(&res.u, &k).unwrap();
        let lap = crate::grid::neumann_laplacian(&(&k / &pf));
        let alpha = 2.0 * lap.sup_norm() / (&r * &pf).min();
        assert!(dev <= alpha * pf.max() * d, "{dev}");
        assert!(dev <= 0.02);
    }

    #[test]
    fn rejects_non_positive_start() {
        let g = GridSpec::unit(16).unwrap();
        let k = ScalarField::constant(g, 1.0);
        let p = Problem::new(1.0, k.clone(), k.clone(), k.clone()).unwrap();
        assert!(matches!(
            newton_solve(&p, &k.scale(-1.0), &SolverOptions::default()),
            Err(SolverError::InvalidProblem(_))
        ));
    }

    #[test]
    fn reports_exhausted_iterations() {
        let g = GridSpec::unit(64).unwrap();
        let k = ScalarField::from_fn(g, |x| 2.0 + (PI * x).cos());
        let pf = ScalarField::from_fn(g, |x| 2.0 - (2.0 * PI * x).cos());
        let p = Problem::new(1.0, k.clone(), pf, k.clone()).unwrap();
        let opts = SolverOptions {
            max_newton_iters: 1,
            ..SolverOptions::default()
        };
        let err = newton_solve(&p, &k.scale(50.0), &opts).unwrap_err();
        assert!(matches!(
            err,
            SolverError::NoConvergence {
                cause: FailureCause::IterationsExhausted,
                ..
            }
        ));
    }
}
