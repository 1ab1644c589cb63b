use std::path::PathBuf;

use hklab::llv::build_frame;
use hklab::module_io::{export_module, load_module, validate};
use hklab::quadratic::{default_tail, make_standard_space};
use hklab::synthetic::{clifford_odd_module, corrupted_sh};
use hklab::verbitsky::{build_verbitsky, GradedAlgebra, DEFAULT_BUDGET};

fn read(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)).unwrap()
}

fn sh() -> GradedAlgebra {
    build_verbitsky(&make_standard_space(5, &default_tail(5)).unwrap(), 2, DEFAULT_BUDGET, 0).unwrap()
}

#[test]
fn checked_in_fixtures_match_regeneration() {
    let alg = sh();
    let frame = build_frame(alg.space(), 0).unwrap();
    assert_eq!(read("exported_sh.json"), export_module(&alg, &frame).unwrap());
    assert_eq!(read("corrupted.json"), corrupted_sh(&alg).unwrap().to_json().unwrap());
    assert_eq!(read("clifford_odd.json"), clifford_odd_module(&alg, &default_tail(5)).unwrap().to_json().unwrap());
}

#[test]
fn fixtures_round_trip_byte_exactly() {
    for name in ["exported_sh.json", "corrupted.json", "clifford_odd.json"] {
        let text = read(name);
        assert_eq!(load_module(&text).unwrap().to_json().unwrap(), text, "{name}");
    }
}

#[test]
fn fixture_validation_outcomes() {
    assert!(validate(&load_module(&read("exported_sh.json")).unwrap()).all_passed());
    assert!(validate(&load_module(&read("clifford_odd.json")).unwrap()).all_passed());
    let bad = validate(&load_module(&read("corrupted.json")).unwrap());
    let first = bad.first_failure().unwrap();
    assert_eq!(first.name, "L_commute");
    assert!(first.witness.is_some());
}

#[test]
fn export_size_is_bounded_by_dims() {
    let text = read("exported_sh.json");
    let spec = load_module(&text).unwrap();
    let total: usize = spec.degrees.iter().sum();
    let b2 = spec.space.dim();
    // every stored entry is a short rational string; the operators dominate
    let entries = (b2 + 1) * total * total + b2 * total * total;
    assert!(text.len() < 64 * entries + 4096);
}
