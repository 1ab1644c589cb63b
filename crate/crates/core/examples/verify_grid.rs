//! Runs the full verification suite over the default grid in parallel and
//! prints one summary line per instance.

use std::time::Instant;

use hklab::verifier::{default_grid, run_grid};

fn main() -> hklab::Result<()> {
    let start = Instant::now();
    let grid = default_grid(0);
    for (cfg, report) in grid.iter().zip(run_grid(&grid)) {
        let report = report?;
        println!(
            "n={} b2={}: {} verdicts, {} asserted failures, profile {}",
            cfg.n,
            cfg.b2,
            report.verdicts.len(),
            report.failures().len(),
            report.profiles["M"].render()
        );
    }
    println!("grid finished in {:.1?}", start.elapsed());
    Ok(())
}
