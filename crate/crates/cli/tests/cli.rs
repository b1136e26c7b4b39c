use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const UNIT_LINE: &str =
    r#"{"n":2,"generators":[[{"exps":[1,0],"coeff":1},{"exps":[0,1],"coeff":1},{"exps":[0,0],"coeff":-1}]]}"#;

fn tvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvlab")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn scan_csv_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let variety = write(dir.path(), "line.json", UNIT_LINE);
    let csv = dir.path().join("scan.csv");
    let out = tvlab(&[
        "scan", "--variety", &variety, "--prime", "7", "--max-order", "12", "--precision", "12",
        "--format", "csv", "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,point,distance_kind,val_num,val_den"));
    let rows: Vec<&str> = lines.collect();
    let members: Vec<&&str> = rows.iter().filter(|r| r.contains(",member,")).collect();
    assert_eq!(members.len(), 2);

    let json = tvlab(&["scan", "--variety", &variety, "--prime", "7", "--max-order", "12", "--precision", "12"]);
    let report = stdout_json(&json);
    assert_eq!(report["points"].as_u64().unwrap() as usize, rows.len());
    assert_eq!(report["member_count"], 2);
    let hist_total: u64 = report["histogram"]
        .as_object()
        .unwrap()
        .values()
        .flat_map(|h| h.as_object().unwrap().values().map(|v| v.as_u64().unwrap()))
        .sum();
    assert_eq!(hist_total as usize, rows.len());
}

#[test]
fn distance_of_a_member_and_a_neighbour() {
    let dir = tempfile::tempdir().unwrap();
    let variety = write(dir.path(), "line.json", UNIT_LINE);
    let member = stdout_json(&tvlab(&["distance", "--variety", &variety, "--point", "1/6,5/6", "--prime", "7"]));
    assert_eq!(member["distance"]["kind"], "member");
    let near = stdout_json(&tvlab(&[
        "distance", "--variety", &variety, "--point", "2/3,2/3", "--prime", "7", "--all-embeddings",
    ]));
    assert_eq!(near["distance"]["kind"], "val");
    assert_eq!((near["distance"]["val_num"].as_u64(), near["distance"]["val_den"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn mattuck_reports_the_ramified_witness() {
    let out = tvlab(&["mattuck", "--prime", "5", "--max-order", "30"]);
    assert!(out.status.success());
    let r = stdout_json(&out);
    assert_eq!(r["min_distance"]["val_num"], 1);
    assert_eq!(r["min_distance"]["val_den"], 4);
    assert_eq!(r["witness"], serde_json::json!(["0/1", "1/5"]));
}

#[test]
fn boxall_worked_instance() {
    let out = tvlab(&["boxall", "--module", "27", "--generators", "[[[4]]]", "--point", "1", "--oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["witness"]["sigma"]["rows"], serde_json::json!([[10]]));
    assert_eq!(r["witness"]["x"], serde_json::json!([9]));
    assert!(!r["oracle"].as_array().unwrap().is_empty());
    // ×2 on Z/9 moves 3 ∈ A[3], violating the hypotheses.
    let bad = tvlab(&["boxall", "--module", "9", "--generators", "[[[2]]]", "--point", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn zcore_fibonacci_agrees_with_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let mu3 = write(dir.path(), "mu3.json", r#"[{"n":1,"lattice":[[3]],"shift":["0/1"]}]"#);
    let out = tvlab(&["zcore", "--subscheme", &mu3, "--poly", "-1,-1,1", "--brute-force", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["brute_force"]["points"], 9);
    assert_eq!(r["brute_force"]["agrees"], true);
    // μ_3 × μ_3 is finite, so its components are its 9 points.
    assert_eq!(r["core"].as_array().unwrap().len(), 9);
}

#[test]
fn polynomial_identities() {
    let four = stdout_json(&tvlab(&["polyid", "multiplier", "1", "-5,1", "-1,1"]));
    assert_eq!(four["multiplier"], 4);
    let three = stdout_json(&tvlab(&["polyid", "multiplier", "-1,1", "-1,3,-3,1", "-1,0,0,1"]));
    assert_eq!(three["multiplier"], 3);
    let tame = tvlab(&["polyid", "tame", "4"]);
    assert!(tame.status.success());
    assert_eq!(stdout_json(&tame)["claimed_multiplier"], 16);
    let phi3 = stdout_json(&tvlab(&["polyid", "cyclotomic-free", "1,1,1"]));
    assert_eq!(phi3["cyclotomic_free"], false);
    assert!(tvlab(&["polyid", "congruence", "12"]).status.success());
}

#[test]
fn frobenius_checks() {
    let out = tvlab(&["frobcheck", "curve", "--field", "p=5,f=1", "--curve", "a4=1,a6=0", "--degree", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    assert_eq!(r["count"]["count"], 4);
    assert_eq!(r["count"]["trace"], 2);
    assert!(tvlab(&["frobcheck", "gm", "--max-size", "200"]).status.success());
    assert!(tvlab(&["frobcheck", "hasse", "--q", "7"]).status.success());
    let singular = tvlab(&["frobcheck", "curve", "--field", "p=5,f=1", "--curve", "a4=0,a6=0"]);
    assert_eq!(singular.status.code(), Some(2));
}

#[test]
fn habegger_table() {
    let out = tvlab(&["habegger", "--prime", "3", "--n-max", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("3,2,6,2,"));
}

#[test]
fn verify_all_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = tvlab(&["verify-all", "--quick", "--out", summary.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s: Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["passed"], true);
    assert_eq!(s["criteria"].as_array().unwrap().len(), 8);
    assert_eq!(String::from_utf8_lossy(&out.stderr).matches("PASS").count(), 8);
}

#[test]
fn corrupted_fixture_fails_the_gap_scan() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", r#"{"n": 2, "generators": [[{"exps": [1]}]]}"#);
    let out = tvlab(&["verify-all", "--quick", "--variety", &broken]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL [2] gap scan on x + y = 1"), "{err}");
    assert_eq!(stdout_json(&out)["failed"], serde_json::json!([2]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tvlab(&["scan", "--prime", "7"]).status.code(), Some(2));
    assert_eq!(tvlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(tvlab(&["mattuck", "--prime", "6"]).status.code(), Some(2));
    assert_eq!(tvlab(&["habegger", "--prime", "2"]).status.code(), Some(2));
    assert!(tvlab(&["--help"]).status.success());
}
