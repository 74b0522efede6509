use std::path::Path;

use corrdist::bounds::{c0, classical_tight_bound};
use corrdist::cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use corrdist::format::num;
use corrdist::prob::{binary_joint_from_params, classical_mutual_information, BinaryParams};
use corrdist::qubit::{make_state, quantum_correlation_distance, StateFamily, TwoQubitState};
use corrdist::Unit;

fn corrdist(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("corrdist").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn c0_matches_library() {
    let (code, out, _) = corrdist(&["c0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), num(c0()));
    let printed: f64 = out.trim().parse().unwrap();
    assert!((printed - 0.72654).abs() < 5e-5);
}

#[test]
fn werner_state_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("werner_p1.json");
    let (code, _, err) = corrdist(&["make-state", "--family", "werner", "--p", "1", "--out", path_str(&file)]);
    assert_eq!(code, EXIT_OK, "{err}");

    let (code, out, _) = corrdist(&["cdist", "--state", path_str(&file)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim().parse::<f64>().unwrap(), 1.5);

    let (_, out, _) = corrdist(&["mi", "--state", path_str(&file)]);
    assert_eq!(out.trim(), "2");
    let (_, out, _) = corrdist(&["--nats", "mi", "--state", path_str(&file)]);
    assert_eq!(out.trim(), num(4f64.ln()));

    let (_, out, _) = corrdist(&["entangle", "--state", path_str(&file)]);
    assert!(out.contains("ppt_entangled=true"));
    assert!(out.contains("cdist_gt_one=true"));
}

#[test]
fn output_is_byte_identical_to_library() {
    let (code, out, _) = corrdist(&["classical-bound", "--c", "0.5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, format!("{}\n", num(classical_tight_bound(0.5, Unit::Bits).unwrap())));

    let (_, out, _) = corrdist(&["mi", "--binary", "0.2", "-0.3", "-0.4"]);
    let t = binary_joint_from_params(&BinaryParams { x: 0.2, y: -0.3, r: -0.4 }).unwrap();
    assert_eq!(out, format!("{}\n", num(classical_mutual_information(&t, Unit::Bits))));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bd.json");
    corrdist(&["make-state", "--family", "bell-diagonal", "--r", "-0.5", "0.2", "0.1", "--out", path_str(&file)]);
    let rho = make_state(&StateFamily::BellDiagonal { r: [-0.5, 0.2, 0.1] }).unwrap();
    let (_, out, _) = corrdist(&["cdist", "--state", path_str(&file)]);
    assert_eq!(out.trim(), num(quantum_correlation_distance(&rho).unwrap()));
}

#[test]
fn table_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.csv");
    std::fs::write(&file, "# perfectly correlated\n0.5,0\n0,0.5\n").unwrap();
    let (_, out, _) = corrdist(&["mi", "--table", path_str(&file)]);
    assert_eq!(out.trim(), "1");
    let (_, out, _) = corrdist(&["cdist", "--table", path_str(&file)]);
    assert_eq!(out.trim(), "1");
}

#[test]
fn bell_resources_at_maximum() {
    let (code, out, _) = corrdist(&["bell-resources", "--v", "2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "c_max=1 i_min=1");
}

#[test]
fn twirl_and_model_check() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("p.json");
    corrdist(&["make-state", "--family", "product", "--u", "0", "0", "1", "--v", "0", "0", "-1", "--out", path_str(&state)]);
    let (code, out, _) = corrdist(&["twirl", "--state", path_str(&state)]);
    assert_eq!(code, EXIT_OK);
    let twirled = TwoQubitState::from_json(&out).unwrap();
    // ⟨σz⊗σz⟩ = -1 twirls to M = -(1/3) I, a Werner state with p = 1/3
    let w = make_state(&StateFamily::Werner { p: 1.0 / 3.0 }).unwrap();
    let diff = corrdist::linalg::max_abs_diff(twirled.matrix(), w.matrix());
    assert!(diff < 1e-12, "{diff}");

    let model = dir.path().join("m.json");
    let table = "[[[0.5,0.0],[0.0,0.5]]]";
    let json = format!(
        r#"{{"lambda_weights":[1.0],"conditionals":{{"AB":{table},"ABp":{table},"ApB":{table},"ApBp":{table}}}}}"#
    );
    std::fs::write(&model, json).unwrap();
    let (code, out, _) = corrdist(&["model-check", "--model", path_str(&model)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), "chsh=2 c_max=1 relaxed_bound=4 outcome_independent=false");
}

#[test]
fn figure_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fig2.csv");
    let (code, _, _) = corrdist(&["figure", "--which", "fig2", "--step", "0.01", "--out", path_str(&file)]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("# C0="));
    assert_eq!(text.lines().count(), 2 + 151);
    for line in text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let c: f64 = cols[0].parse().unwrap();
        assert_eq!(cols[2].is_empty(), c > 1.0, "{line}");
        if c > c0() + 1e-9 && c <= 1.0 {
            let k: f64 = cols[2].parse().unwrap();
            let q: f64 = cols[3].parse().unwrap();
            assert!(q < k, "{line}");
        }
    }
}

#[test]
fn verify_reports() {
    let (code, out, _) = corrdist(&["verify", "--kind", "classical_tight", "--samples", "500", "--seed", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("violations=0"));
    let (code, out, _) = corrdist(&["verify", "--kind", "conjecture_general_states", "--samples", "200"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(reported only)") && out.contains("worst_case="));
    let (code, out, _) = corrdist(&["verify", "--kind", "relaxed_chsh", "--samples", "50", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["samples"], 50);
}

#[test]
fn exit_codes() {
    assert_eq!(corrdist(&["pinsker", "--c", "-1"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["quantum-bound", "--c", "1.6"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["bell-resources", "--v", "3"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["mi", "--binary", "0.9", "-0.9", "0.5"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["cdist", "--state", "/nonexistent/state.json"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["verify", "--kind", "nope"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["make-state", "--family", "werner", "--out", "/tmp/x.json"]).0, EXIT_DOMAIN);
    assert_eq!(corrdist(&["mi"]).0, EXIT_USAGE);
    assert_eq!(corrdist(&["frobnicate"]).0, EXIT_USAGE);
    let (code, _, err) = corrdist(&["mi", "--table", "a.csv", "--state", "b.json"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
    let (code, out, _) = corrdist(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("quantum-bound"));
}

#[test]
fn oracle_command() {
    let (code, out, _) = corrdist(&["oracle", "--kind", "classical", "--c", "0.5", "--resolution", "200"]);
    assert_eq!(code, EXIT_OK);
    let v: f64 = out.trim().parse().unwrap();
    assert!((v - 0.188722).abs() < 1e-4);
    assert_eq!(corrdist(&["oracle", "--kind", "classical", "--c", "0.5", "--resolution", "10"]).0, EXIT_DOMAIN);
}
