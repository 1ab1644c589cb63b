use std::path::PathBuf;
use std::process::{Command, Output};

use hklab::module_io::load_module;
use hklab::verbitsky::GradedAlgebra;

fn hklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hklab"))
        .args(args)
        .env_remove("HKLAB_SEED")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn build_writes_deterministic_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = hklab(&["build", "--n", "2", "--b2", "5", "--seed", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(GradedAlgebra::from_json(&text).unwrap().dims(), &[1, 5, 15, 5, 1]);
}

#[test]
fn seed_defaults_to_environment() {
    let by_flag = hklab(&["build", "--n", "1", "--b2", "5", "--seed", "7"]);
    let by_env = Command::new(env!("CARGO_BIN_EXE_hklab"))
        .args(["build", "--n", "1", "--b2", "5"])
        .env("HKLAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(by_flag.stdout, by_env.stdout);
}

#[test]
fn small_b2_is_a_usage_error() {
    assert_eq!(hklab(&["build", "--b2", "3"]).status.code(), Some(2));
    assert_eq!(hklab(&["build", "--b2", "6", "--tail", "1"]).status.code(), Some(2));
    assert_eq!(hklab(&["verify", "--grid", "1x3"]).status.code(), Some(2));
}

#[test]
fn budget_exhaustion_is_a_runtime_error() {
    let o = hklab(&["build", "--n", "2", "--b2", "5", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

#[test]
fn verify_small_instance_exits_zero() {
    let o = hklab(&["verify", "--n", "1", "--b2", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("model operator M"));
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn verify_stored_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    assert_eq!(hklab(&["build", "--n", "1", "--b2", "6", "--out", a.to_str().unwrap()]).status.code(), Some(0));
    let o = hklab(&["verify", "--in", a.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["instance"]["b2"], 6);
}

#[test]
fn verify_corrupted_module_fails_with_witness() {
    let o = hklab(&["verify", "--module", &fixture("corrupted.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<_> = v["verdicts"].as_array().unwrap().iter().filter(|v| v["passed"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|v| v["witness"].is_string()));
    assert!(v["profiles"].as_object().unwrap().is_empty(), "analysis must not run on an invalid module");
}

#[test]
fn verify_exported_and_odd_modules() {
    for f in ["exported_sh.json", "clifford_odd.json"] {
        let o = hklab(&["verify", "--module", &fixture(f)]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
    }
}

#[test]
fn verify_default_grid_reports_every_instance() {
    let o = hklab(&["verify", "--grid", "default", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 12);
    let pairs: Vec<(u64, u64)> = reports
        .iter()
        .map(|r| (r["instance"]["n"].as_u64().unwrap(), r["instance"]["b2"].as_u64().unwrap()))
        .collect();
    assert_eq!(pairs, (1..=3).flat_map(|n| (4..=7).map(move |b| (n, b))).collect::<Vec<_>>());
}

#[test]
fn diamond_degree_two_matches_layout() {
    let o = hklab(&["diamond", "--n", "1", "--b2", "5", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| l.contains('|'))
        .map(|l| l.split('|').nth(1).unwrap().split_whitespace().collect())
        .collect();
    assert_eq!(rows, vec![vec!["1"], vec!["1", "1", "1"], vec!["1"]]);

    let o = hklab(&["diamond", "--n", "1", "--b2", "5", "--degree", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells: Vec<(i64, i64, i64)> = v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c[0].as_i64().unwrap(), c[1].as_i64().unwrap(), c[2].as_i64().unwrap()))
        .collect();
    assert_eq!(cells, vec![(0, 1, 1), (1, 0, 1), (1, 1, 1), (1, 2, 1), (2, 1, 1)]);
}

#[test]
fn diamond_degree_zero_is_one_cell() {
    let o = hklab(&["diamond", "--n", "2", "--b2", "4", "--degree", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cells"], serde_json::json!([[0, 0, 1]]));
}

#[test]
fn transport_default_planes() {
    let o = hklab(&["transport", "--b2", "4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["determinant"], "1");
    assert_eq!(v["preserves_gram"], true);
    assert_eq!(v["inverse_round_trip"], true);
}

#[test]
fn transport_two_orbit_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("planes.json");
    let planes = serde_json::json!({
        "plane1": {"v1": ["1", "0", "0", "0"], "v2": ["0", "0", "1", "0"]},
        "plane2": {"v1": ["1", "0", "0", "0"], "v2": ["0", "0", "0", "1"]},
    });
    std::fs::write(&p, planes.to_string()).unwrap();
    let o = hklab(&["transport", "--b2", "4", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("two families"));
}

#[test]
fn export_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    assert_eq!(hklab(&["export", "--n", "1", "--b2", "5", "--out", p.to_str().unwrap()]).status.code(), Some(0));
    let o = hklab(&["validate", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
    load_module(&std::fs::read_to_string(&p).unwrap()).unwrap();
}

#[test]
fn validate_corrupted_fixture() {
    let o = hklab(&["validate", "--in", &fixture("corrupted.json"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let l_commute = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "L_commute").unwrap();
    assert_eq!(l_commute["passed"], false);
    assert!(l_commute["witness"].as_str().unwrap().contains("H^"));
}

#[test]
fn truncated_module_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    let text = std::fs::read_to_string(fixture("exported_sh.json")).unwrap();
    std::fs::write(&p, &text[..text.len() / 2]).unwrap();
    let o = hklab(&["validate", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}
