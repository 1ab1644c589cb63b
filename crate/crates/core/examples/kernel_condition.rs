//! Prints the per-(p,q) kernel table of L_beta and L_sbar for small SH instances.

use hklab::verifier::{kernel_condition_table, Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    for (n, b2) in [(2, 4), (2, 5), (3, 5)] {
        let inst = Instance::build(&InstanceConfig::standard(n, b2, 0))?;
        println!("n={n} b2={b2}");
        for e in kernel_condition_table(&inst.data.ops, &inst.data.big)? {
            println!("  H^({},{}): dim {}, kernel {}", e.p, e.q, e.dim_hpq, e.kernel_dim);
        }
    }
    Ok(())
}
