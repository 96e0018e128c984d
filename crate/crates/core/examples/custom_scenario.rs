//! Define a scenario in the text format, validate it, sweep it and print the
//! normalised configuration.

use dispersal::analysis::{classify_profile, run_sweep};
use dispersal::scenario::load_scenario;

const CONFIG: &str = r#"
# capacity-weighted dispersal with growth equal to capacity
name = "p_equals_k_squared"
K = "2+cos(pi*x)"
P = "(2+cos(pi*x))^2"
r = "2+cos(pi*x)"
n_cells = 256
d_points = 41
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = load_scenario(CONFIG)?;
    print!("{}", scenario.to_config_string());
    let run = run_sweep(&scenario)?;
    let first = &run.table.rows[0];
    println!(
        "M(d_min) - intK = {:+.3e}; profile {}",
        first.m_minus_int_k,
        classify_profile(&run.table)?.shape
    );

    match load_scenario("K = \"cos(pi*x)\"\nP = \"1\"\nr = \"1\"\n") {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected as expected: {e}"),
    }
    Ok(())
}
