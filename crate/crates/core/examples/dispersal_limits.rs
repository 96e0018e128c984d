//! Compare the sweep ends with the slow- and fast-dispersal limits: u -> K
//! at rate O(d), and u -> beta P.

use dispersal::analysis::{beta_limit, run_sweep};
use dispersal::grid::{inf_norm_diff, integrate};
use dispersal::scenario::{builtin_example, BUILTIN_IDS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<16} {:>12} {:>12} {:>12} {:>14}", "scenario", "M(d_max)", "beta*intP", "rel. gap", "|u-K|/d at d0");
    for id in BUILTIN_IDS {
        let run = run_sweep(&builtin_example(id)?)?;
        let f = &run.fields;
        let limit = beta_limit(&f.r, &f.k, &f.p) * integrate(&f.p);
        let last = run.table.rows.last().expect("rows");
        let first = &run.results[0];
        let rate = inf_norm_diff(&first.u, &f.k)? / run.table.rows[0].d;
        println!(
            "{id:<16} {:>12.8} {:>12.8} {:>12.2e} {:>14.4}",
            last.m,
            limit,
            (last.m - limit).abs() / limit,
            rate
        );
    }
    Ok(())
}
