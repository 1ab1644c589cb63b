//! Builds the Verbitsky component for a grid of instances and prints the
//! dimension table, sampling statistics and build time.

use std::time::Instant;

use hklab::quadratic::{default_tail, make_standard_space};
use hklab::verbitsky::{build_verbitsky, expected_dim, DEFAULT_BUDGET};

fn main() -> hklab::Result<()> {
    for n in 1..=3 {
        for b2 in 4..=7 {
            let space = make_standard_space(b2, &default_tail(b2))?;
            let start = Instant::now();
            let alg = build_verbitsky(&space, n, DEFAULT_BUDGET, 0)?;
            let expected: Vec<usize> = (0..=2 * n).map(|k| expected_dim(b2, n, k)).collect();
            assert_eq!(alg.dims(), expected.as_slice());
            let stats = alg.stats().expect("freshly built");
            println!(
                "n={n} b2={b2} dims={:?} samples={} built in {:.2?}",
                alg.dims(),
                stats.samples_used,
                start.elapsed()
            );
        }
    }
    Ok(())
}
