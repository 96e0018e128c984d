//! Positive steady states of `d Δ(u/P) + r u (1 - u/K) = 0` with
//! `∂(u/P)/∂n = 0`.
//!
//! The primary route is damped Newton on the nodal unknown `u` with a
//! tridiagonal Jacobian. [`pseudo_transient`] marches the time-dependent
//! problem to the same fixed point and serves as an independent oracle and
//! as the fallback when Newton stalls. [`continuation_sweep`] walks an
//! ascending grid of `d` values with warm starts.

mod continuation;
mod newton;
mod transient;
mod tridiag;

pub use continuation::continuation_sweep;
pub use newton::newton_solve;
pub use transient::pseudo_transient;
pub use tridiag::{SingularMatrix, Tridiagonal, PIVOT_RTOL};

use std::fmt;

use thiserror::Error;

use crate::grid::{neumann_laplacian, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Newton,
    PseudoTransient,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::PseudoTransient => "pseudo_transient",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why an iterative solve gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureCause {
    IterationsExhausted,
    DampingTooSmall,
    SingularJacobian,
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureCause::IterationsExhausted => "iterations exhausted",
            FailureCause::DampingTooSmall => "damping below minimum",
            FailureCause::SingularJacobian => "singular Jacobian",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("{method} did not converge: {cause} after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        method: Method,
        cause: FailureCause,
        iterations: usize,
        residual: f64,
    },
    #[error(transparent)]
    Singular(#[from] SingularMatrix),
    #[error("continuation failed at d = {d:e}: {source}")]
    SweepFailure {
        d: f64,
        #[source]
        source: Box<SolverError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub min_damping: f64,
    pub pt_tol: f64,
    pub pt_max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_newton_iters: 50,
            min_damping: (2.0f64).powi(-20),
            pt_tol: 1e-8,
            pt_max_steps: 200_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), SolverError> {
        let ok = self.newton_tol > 0.0
            && self.pt_tol > 0.0
            && self.min_damping > 0.0
            && self.min_damping < 1.0
            && self.max_newton_iters > 0
            && self.pt_max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(SolverError::InvalidProblem(format!(
                "solver options out of range: {self:?}"
            )))
        }
    }
}

/// One instance of the steady-state problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    d: f64,
    k: ScalarField,
    p: ScalarField,
    r: ScalarField,
}

impl Problem {
    pub fn new(d: f64, k: ScalarField, p: ScalarField, r: ScalarField) -> Result<Self, SolverError> {
        if !(d.is_finite() && d >= 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "diffusion coefficient must be finite and non-negative, got {d}"
            )));
        }
        if !(k.same_grid(&p) && k.same_grid(&r)) {
            return Err(SolverError::InvalidProblem(
                "K, P and r must share one grid".into(),
            ));
        }
        for (name, f) in [("K", &k), ("P", &p), ("r", &r)] {
            if f.min() <= 0.0 {
                return Err(SolverError::InvalidProblem(format!(
                    "{name} must be strictly positive (min = {})",
                    f.min()
                )));
            }
        }
        Ok(Self { d, k, p, r })
    }

    pub fn with_d(&self, d: f64) -> Result<Self, SolverError> {
        Self::new(d, self.k.clone(), self.p.clone(), self.r.clone())
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn k(&self) -> &ScalarField {
        &self.k
    }

    pub fn p(&self) -> &ScalarField {
        &self.p
    }

    pub fn r(&self) -> &ScalarField {
        &self.r
    }

    pub(crate) fn check_start(&self, u0: &ScalarField) -> Result<(), SolverError> {
        if !u0.same_grid(&self.k) {
            return Err(SolverError::InvalidProblem(
                "initial guess lives on a different grid".into(),
            ));
        }
        if u0.min() <= 0.0 {
            return Err(SolverError::InvalidProblem(
                "initial guess must be strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Converged (or best) steady state with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub u: ScalarField,
    pub iterations: usize,
    /// Sup norm of the residual at `u`.
    pub residual_norm: f64,
    /// Residual level accepted as converged: the requested tolerance, or
    /// the roundoff floor of the residual evaluation when that is larger.
    pub tolerance: f64,
    pub converged: bool,
    pub method: Method,
}

/// `F(u) = d L(u/P) + r u (1 - u/K)` at every node.
pub fn residual(u: &ScalarField, p: &Problem) -> ScalarField {
    let w = u / &p.p;
    let lap = neumann_laplacian(&w);
    let mut out = lap.into_values();
    for (i, v) in out.iter_mut().enumerate() {
        let (ui, ki, ri) = (u.values()[i], p.k.values()[i], p.r.values()[i]);
        *v = p.d * *v + ri * ui * (1.0 - ui / ki);
    }
    ScalarField::new(*u.grid(), out).expect("residual stays on the grid")
}

/// Tridiagonal Jacobian `d L diag(1/P) + diag(r (1 - 2u/K))`.
pub fn jacobian(u: &ScalarField, p: &Problem) -> Tridiagonal {
    let g = u.grid();
    let n = g.n_cells();
    let c = p.d / (g.h() * g.h());
    let (uv, kv, pv, rv) = (u.values(), p.k.values(), p.p.values(), p.r.values());
    let reaction = |i: usize| rv[i] * (1.0 - 2.0 * uv[i] / kv[i]);

    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n + 1];
    let mut sup = vec![0.0; n];
    diag[0] = -2.0 * c / pv[0] + reaction(0);
    sup[0] = 2.0 * c / pv[1];
    for i in 1..n {
        sub[i - 1] = c / pv[i - 1];
        diag[i] = -2.0 * c / pv[i] + reaction(i);
        sup[i] = c / pv[i + 1];
    }
    sub[n - 1] = 2.0 * c / pv[n - 1];
    diag[n] = -2.0 * c / pv[n] + reaction(n);
    Tridiagonal::new(sub, diag, sup)
}

/// Size of the rounding noise in an evaluation of [`residual`] at `u`.
///
/// The Laplacian term loses about one ulp of `|u/P|` per stencil entry and
/// is then scaled by `d/h²`, so at large `d` the residual cannot be driven
/// below this level no matter how accurate `u` is.
pub fn residual_floor(u: &ScalarField, p: &Problem) -> f64 {
    const SAFETY: f64 = 16.0;
    let g = u.grid();
    let n = g.n_cells();
    let c = p.d / (g.h() * g.h());
    let w: Vec<f64> = u
        .values()
        .iter()
        .zip(p.p.values())
        .map(|(u, p)| (u / p).abs())
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let stencil = match i {
            0 => 2.0 * (w[0] + w[1]),
            _ if i == n => 2.0 * (w[n] + w[n - 1]),
            _ => w[i - 1] + 2.0 * w[i] + w[i + 1],
        };
        let ui = u.values()[i].abs();
        let react = p.r.values()[i] * ui * (1.0 + ui / p.k.values()[i]);
        worst = worst.max(c * stencil + react);
    }
    SAFETY * f64::EPSILON * worst
}
