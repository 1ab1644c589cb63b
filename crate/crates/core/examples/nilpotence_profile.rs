//! Prints nilp(M_d) for every degree of SH over a small grid, together with
//! the even-degree verdicts.

use hklab::verifier::{check_even_nagai, check_power_identities, nilpotence_profile, Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    for n in 1..=3 {
        for b2 in [4, 5] {
            let inst = Instance::build(&InstanceConfig::standard(n, b2, 0))?;
            let profile = nilpotence_profile(&inst.data.m)?;
            println!("n={n} b2={b2}: {}", profile.render());
            let mut verdicts = check_even_nagai(&profile, n);
            verdicts.extend(check_power_identities(&inst.data.m, n)?);
            for v in verdicts {
                println!("  {}", v.line());
            }
        }
    }
    Ok(())
}
