//! Prints the (q, i) tables of V^{p,q,i} for every even degree of SH with
//! n = 2, b2 = 5.

use hklab::verifier::{diamond_report, Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    let inst = Instance::build(&InstanceConfig::standard(2, 5, 0))?;
    for d in (0..=8).step_by(2) {
        print!("{}", diamond_report(&inst.data.big, d).render_text());
        println!();
    }
    Ok(())
}
