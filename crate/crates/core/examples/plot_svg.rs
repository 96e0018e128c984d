//! Write a sweep of the proportional case to CSV and SVG.
//!
//! ```text
//! cargo run --release --example plot_svg -- /tmp/ex44
//! ```

use std::path::PathBuf;

use dispersal::cli::{self, ExitStatus};

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plot_output".into()));
    std::fs::create_dir_all(&dir).expect("output directory");
    let csv = dir.join("ex4.4.csv");
    let svg = dir.join("ex4.4.svg");
    let status = cli::run([
        "dispersal",
        "sweep",
        "--example",
        "ex4.4",
        "--out",
        csv.to_str().expect("UTF-8 path"),
        "--plot",
        svg.to_str().expect("UTF-8 path"),
    ]);
    assert_eq!(status, ExitStatus::SUCCESS);
    println!("wrote {} and {}", csv.display(), svg.display());
}
