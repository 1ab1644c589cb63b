//! Exports SH as an LLV module, reloads it, checks byte-identical re-export
//! and validates a corrupted copy.

use hklab::llv::build_frame;
use hklab::module_io::{export_module, load_module, validate};
use hklab::synthetic::corrupted_sh;
use hklab::verifier::{Instance, InstanceConfig};

fn main() -> hklab::Result<()> {
    let inst = Instance::build(&InstanceConfig::standard(2, 5, 0))?;
    let frame = build_frame(inst.alg.space(), 0)?;
    let json = export_module(&inst.alg, &frame)?;
    let again = load_module(&json)?.to_json()?;
    println!("exported {} bytes, re-export identical: {}", json.len(), json == again);
    print!("{}", validate(&load_module(&json)?).render_text());
    println!("corrupted copy:");
    print!("{}", validate(&corrupted_sh(&inst.alg)?).render_text());
    Ok(())
}
