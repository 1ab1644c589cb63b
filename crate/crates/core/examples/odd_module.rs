//! Runs the odd-degree checks on the synthetic Clifford module (non-geometric
//! odd part added to SH with n = 2, b2 = 5) and on hand-built bigradings.

use hklab::quadratic::default_tail;
use hklab::synthetic::{asymmetric_odd_bigrading, clifford_odd_module, symmetric_odd_bigrading};
use hklab::verifier::{check_betti_mod4, run_module, Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    let inst = Instance::build(&InstanceConfig::standard(2, 5, 0))?;
    let spec = clifford_odd_module(&inst.alg, &default_tail(5))?;
    println!("module dims {:?}", spec.degrees);
    let report = run_module(&spec, 0)?;
    println!("profile: {}", report.profiles["M"].render());
    for v in report.verdicts.iter().filter(|v| v.claim.contains("M_3") || v.claim.contains("b_")) {
        println!("  {}", v.line());
    }
    for (name, big) in [("symmetric", symmetric_odd_bigrading()), ("asymmetric", asymmetric_odd_bigrading())] {
        println!("{name} bigrading:");
        for v in check_betti_mod4(&big) {
            println!("  {}", v.line());
        }
    }
    Ok(())
}
