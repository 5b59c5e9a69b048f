use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn ramstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramstab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_doc(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn limit_data_prints_exact_values() {
    let out = ramstab(&["limit-data", "@sample"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["C"], "6");
    assert_eq!(v["N"], 4);
    assert_eq!(v["sign"], 1);
}

#[test]
fn limit_data_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(&dir, "berger.json", ramstab::fixtures::BERGER_JSON);
    let v = json(&ramstab(&["limit-data", &path]));
    assert_eq!(v["V"], 2);
    assert_eq!(v["C"], "1");
}

#[test]
fn certify_exit_codes() {
    assert_eq!(ramstab(&["certify", "@berger"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let wild = ramstab::fixtures::BERGER_JSON.replace("\"d\": 1", "\"d\": 3");
    assert_ne!(wild, ramstab::fixtures::BERGER_JSON);
    let path = write_doc(&dir, "wild.json", &wild);
    let out = ramstab(&["certify", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["kind"]["kind"], "NotCertified");
    let bad = write_doc(&dir, "bad.json", r#"{"p": 4, "r": 1, "v_p": 1, "coeff_valuations": {}, "base_valuation": "1"}"#);
    let out = ramstab(&["certify", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p:"));
    assert_eq!(ramstab(&["certify", "/nonexistent/input.json"]).status.code(), Some(2));
}

#[test]
fn batch_certify_runs_in_parallel() {
    let out = ramstab(&["certify", "--jobs", "2", "@sample", "@berger"]);
    assert!(out.status.success());
    let v = json(&out);
    let kinds: Vec<&Value> = v.as_array().unwrap().iter().map(|r| &r["certificate"]["kind"]["kind"]).collect();
    assert_eq!(kinds, ["PotentiallyTRS", "TRS"]);
    let out = ramstab(&["certify", "@berger", "@nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)[1]["error"].as_str().unwrap().contains("nope"));
}

#[test]
fn hh_reports_breaks() {
    let v = json(&ramstab(&["hh", "@berger", "--depth", "3"]));
    let breaks: Vec<&str> = v["breaks"].as_array().unwrap().iter().map(|b| b["b_m"].as_str().unwrap()).collect();
    assert_eq!(breaks, ["2", "5", "14"]);
    assert_eq!(v["Phi"].as_array().unwrap().len(), 3);
    let b = json(&ramstab(&["breaks", "@berger", "--depth", "3"]));
    assert_eq!(b["breaks"], v["breaks"]);
}

#[test]
fn hh_marks_heuristic_d() {
    let dir = tempfile::tempdir().unwrap();
    let doc = ramstab::fixtures::SAMPLE_JSON.replace(",\n  \"d\": 2", "");
    assert_ne!(doc, ramstab::fixtures::SAMPLE_JSON);
    let path = write_doc(&dir, "sample.json", &doc);
    let v = json(&ramstab(&["hh", &path, "--depth", "2"]));
    assert_eq!(v["conditional_on_d"], true);
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tower.svg");
    let out = ramstab(&["plot", "@sample", "--depth", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("viewBox") && svg.contains("polyline"));
}

#[test]
fn out_flag_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("branch.json");
    let out = ramstab(&["branch", "@berger", "--depth", "7", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["valuations"].as_array().unwrap().len(), 8);
    assert_eq!(v["valuations"][7], "1/2187");
}

#[test]
fn selftest_passes() {
    let out = ramstab(&["selftest"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 6);
}
