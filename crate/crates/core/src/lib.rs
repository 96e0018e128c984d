//! Steady states of a logistic reaction-diffusion model in which individuals
//! disperse toward a preferred distribution `P`:
//!
//! ```text
//! d (u/P)'' + r u (1 - u/K) = 0   on (0, 1),   (u/P)' = 0 at both ends.
//! ```
//!
//! The crate solves this problem on a uniform grid, sweeps the dispersal rate
//! `d` to trace the total population `M(d) = ∫u`, classifies the shape of that
//! curve, and checks a catalogue of qualitative claims about `M(d)` against
//! the computed data.
//!
//! * [`expr`] parses the coefficient formulas `K(x)`, `P(x)`, `r(x)`.
//! * [`grid`] holds grids, nodal fields, quadrature and difference operators.
//! * [`solver`] has the Newton solver, a pseudo-transient fallback and the
//!   continuation driver in `d`.
//! * [`scenario`] loads scenario files and the built-in examples.
//! * [`analysis`] computes functionals, profile shapes and verdicts.
//! * [`cli`] is the command-line front end behind the `dispersal` binary.
//!
//! ```
//! use dispersal::analysis::{classify_profile, run_sweep, Shape};
//! use dispersal::scenario::builtin_example;
//!
//! let run = run_sweep(&builtin_example("ex4.2b").unwrap()).unwrap();
//! assert_eq!(classify_profile(&run.table).unwrap().shape, Shape::Increasing);
//! ```

pub mod expr;
pub mod grid;
pub mod solver;
pub mod scenario;
pub mod analysis;
pub mod cli;
