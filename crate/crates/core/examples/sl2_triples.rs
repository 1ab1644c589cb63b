//! Checks the frame sl2-triples and the M-triple on SH with n = 2, b2 = 5,
//! and shows the commutator scalar of the doubled M-triple.

use hklab::llv::check_sl2;
use hklab::verifier::{Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    let inst = Instance::build(&InstanceConfig::standard(2, 5, 0))?;
    for (name, t) in inst.data.ops.triples()? {
        println!("{name}: {:?}", check_sl2(&t)?);
    }
    let doubled = inst.data.ops.m_triple_doubled()?;
    let ef = doubled.e.commutator(&doubled.f)?.to_total_matrix();
    let scalar = ef.proportionality(&doubled.h.to_total_matrix());
    println!("doubled M-triple: {:?}, [E,F] = {} H", check_sl2(&doubled)?, scalar.map_or("?".into(), |s| s.to_string()));
    Ok(())
}
