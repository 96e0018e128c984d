//! Evaluate every claim on one built-in scenario and print the verdicts.
//!
//! ```text
//! cargo run --release --example verify_theorems -- ex4.1b
//! ```

use dispersal::analysis::{verify_scenario, Verdict};
use dispersal::scenario::builtin_example;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "ex4.1a".to_string());
    let (_, reports) = verify_scenario(&builtin_example(&id)?)?;
    for r in &reports {
        if r.verdict == Verdict::Inapplicable {
            println!("{:<22} inapplicable", r.claim.as_str());
        } else {
            println!("{:<22} {:<13} {}", r.claim.as_str(), r.verdict.as_str(), r.observed);
        }
    }
    Ok(())
}
