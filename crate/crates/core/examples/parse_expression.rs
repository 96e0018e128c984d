//! Parse a coefficient expression, print it back, evaluate it and sample it
//! on a grid.
//!
//! ```text
//! cargo run --example parse_expression -- "2+cos(pi*x)"
//! ```

use dispersal::expr::parse;
use dispersal::grid::{integrate, GridSpec};

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "0.1+cos(pi*x)+5*cos(pi*x)^2-2*cos(pi*x)^3".to_string());
    let expr = match parse(&text) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("parsed:   {expr}");
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        match expr.evaluate(x) {
            Ok(v) => println!("f({x:<4}) = {v:.12}"),
            Err(e) => println!("f({x:<4}) : {e}"),
        }
    }
    let grid = GridSpec::unit(512).expect("valid grid");
    match expr.sample(&grid) {
        Ok(field) => println!(
            "on {} nodes: min {:.6}, max {:.6}, integral {:.10}",
            field.len(),
            field.min(),
            field.max(),
            integrate(&field)
        ),
        Err(e) => println!("sampling failed: {e}"),
    }
}
