//! Run the power family r = (K/P)^lambda over several exponents in parallel
//! and summarise how the curve shape and the fast-dispersal limit move.

use dispersal::analysis::{critical_lambda_probe, lambda_sweep, summarize, DEFAULT_LAMBDAS};
use dispersal::scenario::builtin_example;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = builtin_example("ex4.4")?;
    let fields = scenario.fields()?;
    let tables = lambda_sweep(
        &fields.k,
        &fields.p,
        1.0,
        &DEFAULT_LAMBDAS,
        &scenario.d_values(),
        &scenario.opts,
    )?;
    let summary = summarize(&tables)?;
    println!("{:>7} {:>12} {:>12} {:>12}  shape", "lambda", "m_infinity", "max M", "argmax d");
    for r in &summary {
        println!(
            "{:>7} {:>12.8} {:>12.8} {:>12.3e}  {}",
            r.lambda, r.m_infinity, r.max_m, r.argmax_d, r.shape
        );
    }
    let probe = critical_lambda_probe(&summary);
    println!(
        "last exponent with an interior maximum: {:?}, first increasing: {:?}, single threshold fits: {}",
        probe.last_interior_max, probe.first_increasing, probe.consistent
    );
    println!("largest M non-decreasing in lambda: {}", probe.max_m_nondecreasing);
    Ok(())
}
