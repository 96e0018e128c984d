//! Sweep the diffusion rate for a built-in scenario and classify the shape
//! of the total-population curve.
//!
//! ```text
//! cargo run --release --example sweep_total_population -- ex4.3
//! ```

use dispersal::analysis::{classify_profile, run_sweep};
use dispersal::scenario::builtin_example;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "ex4.2a".to_string());
    let scenario = builtin_example(&id)?;
    let run = run_sweep(&scenario)?;
    let t = &run.table;
    println!("{id}: intK={:.8} beta={:.8} m_infinity={:.8}", t.int_k, t.beta, t.m_infinity);
    for row in t.rows.iter().step_by(8) {
        println!(
            "  d={:<10.3e} M={:.8} M-intK={:+.3e} ({} its, {})",
            row.d,
            row.m,
            row.m_minus_int_k,
            row.iterations,
            row.method.as_str()
        );
    }
    let profile = classify_profile(t)?;
    println!(
        "profile: {} ({} interior maxima, {} slope sign changes, max at d={:.3e})",
        profile.shape, profile.n_interior_maxima, profile.n_sign_changes_of_slope, profile.argmax_d
    );
    Ok(())
}
