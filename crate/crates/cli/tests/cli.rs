use std::path::Path;
use std::process::{Command, Output};

fn nilquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilquant"))
        .args(args)
        .env("NILQUANT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn algebra_validate_reports_presets_and_broken_tables() {
    let o = nilquant(&["algebra", "validate", "--group", "heisenberg:2"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"group": {"structure_constants": [[[0,0,0],[0,0,1],[0,0,0]],[[0,0,0],[0,0,0],[0,0,0]],[[0,0,0],[0,0,0],[0,0,0]]], "step": 2}}"#,
    );
    let o = nilquant(&["algebra", "validate", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("antisymmetric"));
}

#[test]
fn config_errors_exit_with_two_and_list_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"group": "abelian:1", "gird": 1, "window": {"sigma": 0}}"#);
    let o = nilquant(&["quantize", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`gird`") && err.contains("window.sigma"), "{err}");

    assert_eq!(code(&nilquant(&["verify", "--suite", "nonexistent"])), 2);
}

#[test]
fn verify_exit_status_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = nilquant(&["verify", "--suite", "weyl", "--seed", "7", "--out", &out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["pass"], true);

    // Tolerances far below roundoff must fail.
    let o = nilquant(&["verify", "--suite", "lie", "--tol-scale", "1e-30"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_reports_are_deterministic() {
    let run = || {
        let o = nilquant(&["verify", "--suite", "weyl", "--json"]);
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_ms"] = 0.into();
        for c in v["checks"].as_array_mut().unwrap() {
            c["wall_ms"] = 0.into();
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn magnetic_with_zero_potential_matches_berezin_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"group": "abelian:1", "grid": {"half_width": 6, "count": 24},
            "xi": {"half_width": 6, "count": 24, "dual_half_width": 6, "dual_count": 24}}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&nilquant(&["quantize", "--config", &cfg, "--out", a.to_str().unwrap()])), 0);
    let o = nilquant(&[
        "quantize", "--config", &cfg, "--scheme", "magnetic", "--potential", "zero", "--out", b.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read(a.join("matrix.bin")).unwrap(), std::fs::read(b.join("matrix.bin")).unwrap());

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert!(summary["schatten"]["s_inf"].as_f64().unwrap() > 0.0);

    let m = a.join("matrix.bin");
    assert_eq!(code(&nilquant(&["export", "--matrix", m.to_str().unwrap()])), 0);
    let csv = std::fs::read_to_string(a.join("matrix.csv")).unwrap();
    assert_eq!(csv.lines().count(), 24);
}

#[test]
fn cost_guard_names_the_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "big.json",
        r#"{"group": "heisenberg:1", "xi": {"half_width": 4, "count": 64, "dual_half_width": 4, "dual_count": 64}}"#,
    );
    let o = nilquant(&["quantize", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--override-cost-guard"));
}
