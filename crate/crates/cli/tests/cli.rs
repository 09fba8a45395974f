//! End-to-end CLI behavior: exit codes, report envelopes, fixture registry.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardy-forge"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("hardy-forge-cli-test-{name}.json"))
}

#[test]
fn malformed_polynomial_exits_2() {
    let status = bin()
        .args(["stratify", "--poly", "x1 +* x2", "--nvars", "2"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = bin()
        .args(["resolve", "--fixture", "no-such-fixture"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn node_budget_exhaustion_exits_3_with_partial_tree() {
    let out = tmp("budget");
    let status = bin()
        .args(["resolve", "--fixture", "cusp", "--max-nodes", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["result"]["budget_exhausted"], true);
}

#[test]
fn zero_sample_budget_yields_empty_witnesses() {
    let out = tmp("budget0");
    let status = bin()
        .args([
            "stratify",
            "--fixture",
            "cross",
            "--sample-budget",
            "0",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let strata = report["result"]["stratification"]["strata"]
        .as_array()
        .unwrap();
    assert_eq!(strata.len(), 2);
    assert!(strata
        .iter()
        .all(|s| s["witnesses"].as_array().unwrap().is_empty()));
}

#[test]
fn reports_carry_the_envelope() {
    let out = tmp("envelope");
    let status = bin()
        .args([
            "growth",
            "--fixture",
            "circle",
            "--eta-min",
            "0.1",
            "--eta-max",
            "0.4",
            "--depth",
            "6",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{status:?}");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], "hardy-forge/1");
    assert_eq!(report["command"], "growth");
    assert_eq!(report["polynomial"], "x1^2 + x2^2");
    assert!(report["config"]["eta_min"].is_number());
    assert!(report["result"]["doubling"]["pairs"].as_array().is_some());
}

#[test]
fn fixtures_listing_names_the_corpus() {
    let output = bin().arg("fixtures").output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    for name in ["line", "cross", "circle", "cusp", "cubic", "shifted-cusp"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn resolve_prints_a_trace() {
    let output = bin()
        .args(["resolve", "--fixture", "cusp", "--out"])
        .arg(tmp("trace"))
        .output()
        .unwrap();
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("root"));
    assert!(text.contains("chart"));
}
