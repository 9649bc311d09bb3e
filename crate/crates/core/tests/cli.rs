use std::process::{Command, Output};

fn pogame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pogame"))
        .args(args)
        .env_remove("POGAME_SEED")
        .output()
        .expect("binary runs")
}

fn strip_timestamp(s: &str) -> String {
    s.lines().filter(|l| !l.contains("\"timestamp\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(pogame(&["bounds", "--n", "4"]).status.code(), Some(2));
    assert_eq!(pogame(&["bounds", "--n", "3", "--nope"]).status.code(), Some(2));
    assert_eq!(pogame(&["bounds", "--n", "15"]).status.code(), Some(2));
    assert_eq!(pogame(&["selftest", "--n", "7"]).status.code(), Some(2));
    assert_eq!(pogame(&["optimize", "--n", "3", "--optimizer", "annealing"]).status.code(), Some(2));
    assert_eq!(pogame(&["certify", "--n", "5", "--family", "trine"]).status.code(), Some(2));
}

#[test]
fn certification_failures_exit_with_one() {
    assert_eq!(pogame(&["certify", "--n", "5"]).status.code(), Some(1));
    assert_eq!(pogame(&["selftest", "--n", "3", "--perturb", "0.05"]).status.code(), Some(1));
    assert_eq!(pogame(&["report", "--n", "5"]).status.code(), Some(1));
}

#[test]
fn successful_runs_exit_with_zero() {
    for args in [
        vec!["bounds", "--n", "5"],
        vec!["optimize", "--n", "5"],
        vec!["selftest", "--n", "5"],
        vec!["certify", "--n", "3"],
        vec!["report", "--n", "3"],
    ] {
        let out = pogame(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn reports_are_reproducible() {
    let a = pogame(&["report", "--n", "5", "--seed", "7"]);
    let b = pogame(&["report", "--n", "5", "--seed", "7"]);
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert!(a.contains("\"timestamp\""));
    assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
}

#[test]
fn seed_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pogame"))
        .args(["optimize", "--n", "3", "--format", "json"])
        .env("POGAME_SEED", "1234")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 1234);
    let out = pogame(&["optimize", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
}

#[test]
fn report_formats() {
    let json = pogame(&["report", "--n", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["local_bound"], 5);
    assert_eq!(v["pnc_bound"], 4);
    assert!((v["quantum_value"].as_f64().unwrap() - 6.0).abs() < 1e-6);
    assert!((v["min_entropy_bits"].as_f64().unwrap() - 1.584962500721156).abs() < 1e-9);

    let csv = String::from_utf8(pogame(&["report", "--n", "3", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.lines().any(|l| l == "pnc_bound,4"));
    assert!(csv.lines().any(|l| l == "bounds.pnc_success_exact,13/18"));

    let text = String::from_utf8(pogame(&["report", "--n", "3", "--format", "text"]).stdout).unwrap();
    assert!(text.contains("local bound: 5"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("pogame-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = pogame(&["report", "--n", "3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let report: pogame::report::CertificationReport = serde_json::from_str(&body).unwrap();
    assert_eq!(report.n, 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn family_selection_and_params() {
    let out = pogame(&["certify", "--n", "5", "--family", "halves", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["family"], "halves");
    let (nu, beta) = pogame::observables::default_transverse(5);
    let params = format!("{nu},{}", -beta);
    let out = pogame(&["selftest", "--n", "5", "--params", &params]);
    assert_eq!(out.status.code(), Some(0));
    let bad = pogame(&["selftest", "--n", "5", "--params", "0.1,0.1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn free_optimizer_exceeds_parity_value_for_five() {
    let out = pogame(&["optimize", "--n", "5", "--optimizer", "seesaw-free", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 15.0).abs() < 1e-6);
    assert!(v["alice_sum_norm"].as_f64().unwrap() > 1.0);
}
