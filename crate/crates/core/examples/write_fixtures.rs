//! Regenerates the module fixtures at the repository root:
//! the exported SH instance, the corrupted copy and the synthetic odd module.

use std::path::PathBuf;

use hklab::llv::build_frame;
use hklab::module_io::{export_module, validate};
use hklab::quadratic::{default_tail, make_standard_space};
use hklab::synthetic::{clifford_odd_module, corrupted_sh};
use hklab::verbitsky::{build_verbitsky, DEFAULT_BUDGET};

fn main() -> hklab::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    std::fs::create_dir_all(&dir)?;
    let space = make_standard_space(5, &default_tail(5))?;
    let alg = build_verbitsky(&space, 2, DEFAULT_BUDGET, 0)?;
    let frame = build_frame(&space, 0)?;

    let files = [
        ("exported_sh.json", export_module(&alg, &frame)?),
        ("corrupted.json", corrupted_sh(&alg)?.to_json()?),
        ("clifford_odd.json", clifford_odd_module(&alg, &default_tail(5))?.to_json()?),
    ];
    for (name, json) in files {
        let spec = hklab::module_io::load_module(&json)?;
        let report = validate(&spec);
        println!("{name}: {} bytes, validation {}", json.len(), if report.all_passed() { "passes" } else { "fails" });
        std::fs::write(dir.join(name), json)?;
    }
    Ok(())
}
