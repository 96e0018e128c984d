use super::{
    residual, residual_floor, FailureCause, Method, Problem, SolveResult, SolverError,
    SolverOptions, Tridiagonal,
};
use crate::grid::ScalarField;

/// Largest step as a multiple of the initial one.
const MAX_STEP_GROWTH: f64 = 1e12;

/// Marches `∂u/∂t = d L(u/P) + r u (1 - u/K)` to steady state.
///
/// Diffusion and the logistic loss `r u²/K` are implicit (the loss lagged
/// as `r u^k u^{k+1} / K`), growth `r u` is explicit:
///
/// ```text
/// (I - Δt d L diag(1/P) + Δt diag(r u^k / K)) u^{k+1} = u^k + Δt r u^k
/// ```
///
/// The system is an M-matrix, so positivity is kept for every step size.
/// The step follows switched evolution relaxation,
/// `Δt_k = Δt_0 ‖F(u^0)‖ / ‖F(u^k)‖` with `Δt_0 = 0.1 / max r`.
pub fn pseudo_transient(
    p: &Problem,
    u0: &ScalarField,
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    opts.validate()?;
    p.check_start(u0)?;

    let g = *u0.grid();
    let n = g.n_cells();
    let c = p.d() / (g.h() * g.h());
    let (kv, pv, rv) = (p.k().values(), p.p().values(), p.r().values());
    let dt0 = 0.1 / p.r().max();

    let mut u = u0.clone();
    let mut f_norm = residual(&u, p).sup_norm();
    let f0 = f_norm;
    for step in 0..opts.pt_max_steps {
        let tol = opts.pt_tol.max(residual_floor(&u, p));
        if f_norm <= tol {
            return Ok(SolveResult {
                u,
                iterations: step,
                residual_norm: f_norm,
                tolerance: tol,
                converged: true,
                method: Method::PseudoTransient,
            });
        }
        let dt = (dt0 * f0 / f_norm).min(dt0 * MAX_STEP_GROWTH);
        let uv = u.values();

        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n + 1];
        let mut sup = vec![0.0; n];
        let a = dt * c;
        let loss = |i: usize| dt * rv[i] * uv[i] / kv[i];
        diag[0] = 1.0 + 2.0 * a / pv[0] + loss(0);
        sup[0] = -2.0 * a / pv[1];
        for i in 1..n {
            sub[i - 1] = -a / pv[i - 1];
            diag[i] = 1.0 + 2.0 * a / pv[i] + loss(i);
            sup[i] = -a / pv[i + 1];
        }
        sub[n - 1] = -2.0 * a / pv[n - 1];
        diag[n] = 1.0 + 2.0 * a / pv[n] + loss(n);
        let rhs: Vec<f64> = (0..=n).map(|i| uv[i] * (1.0 + dt * rv[i])).collect();

        let next = Tridiagonal::new(sub, diag, sup)
            .thomas_solve(&rhs)
            .map_err(|_| SolverError::NoConvergence {
                method: Method::PseudoTransient,
                cause: FailureCause::SingularJacobian,
                iterations: step,
                residual: f_norm,
            })?;
        u = ScalarField::new(g, next).map_err(|_| SolverError::NoConvergence {
            method: Method::PseudoTransient,
            cause: FailureCause::DampingTooSmall,
            iterations: step,
            residual: f_norm,
        })?;
        f_norm = residual(&u, p).sup_norm();
    }

    let tol = opts.pt_tol.max(residual_floor(&u, p));
    if f_norm <= tol {
        return Ok(SolveResult {
            u,
            iterations: opts.pt_max_steps,
            residual_norm: f_norm,
            tolerance: tol,
            converged: true,
            method: Method::PseudoTransient,
        });
    }
    Err(SolverError::NoConvergence {
        method: Method::PseudoTransient,
        cause: FailureCause::IterationsExhausted,
        iterations: opts.pt_max_steps,
        residual: f_norm,
    })
}
