//! Solve one steady state with damped Newton and cross-check it against the
//! pseudo-transient march.

use dispersal::grid::{inf_norm_diff, integrate};
use dispersal::scenario::builtin_example;
use dispersal::solver::{newton_solve, pseudo_transient, Problem, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = builtin_example("ex4.4")?;
    let fields = scenario.fields()?;
    let opts = SolverOptions::default();
    for d in [1e-2, 1.0, 1e2] {
        let problem = Problem::new(d, fields.k.clone(), fields.p.clone(), fields.r.clone())?;
        let newton = newton_solve(&problem, &fields.k, &opts)?;
        let march = pseudo_transient(&problem, &fields.k, &opts)?;
        let gap = inf_norm_diff(&newton.u, &march.u)? / newton.u.sup_norm();
        println!(
            "d={d:<6} M={:.10} newton: {} its, |F|={:.1e}   transient: {} steps   rel. gap {gap:.1e}",
            integrate(&newton.u),
            newton.iterations,
            newton.residual_norm,
            march.iterations,
        );
    }
    println!("integral of K = {:.10}", integrate(&fields.k));
    Ok(())
}
