use std::process::{Command, Output};

use serde_json::Value;

const SHAPE: &str = r#"{"summands":[{"label":"mu1","n":1,"m":2},{"label":"mu2","n":1,"m":1},{"label":"mu3","n":2,"m":1}]}"#;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_endoscopylab"));
    cmd.args(args).env_remove("ENDOSCOPYLAB_GUARD");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["version"], 1);
    value["result"].clone()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(run(&["sx", "--N", "4", "--k", "3"]).status.code(), Some(2));
    assert_eq!(run(&["packet", "--a", "1", "--b", "1", "--P", "3"]).status.code(), Some(2));
    assert_eq!(run(&["poincare", "--bipartition", "[[1"]).status.code(), Some(2));
    assert_eq!(run(&["chains", "--N", "4", "--shape", SHAPE]).status.code(), Some(2));
    assert_eq!(run(&["decay", "--bipartition", "[[2,0],[0,1]]"]).status.code(), Some(2));
}

#[test]
fn guard_violation_exits_one() {
    let out = run_env(&["chains", "--N", "5", "--shape", SHAPE], &[("ENDOSCOPYLAB_GUARD", "3")]);
    assert_eq!(out.status.code(), Some(1));
    let ok = run_env(&["chains", "--N", "5", "--shape", SHAPE], &[("ENDOSCOPYLAB_GUARD", "7")]);
    assert!(ok.status.success());
    let bad = run_env(&["sx", "--N", "4", "--k", "1"], &[("ENDOSCOPYLAB_GUARD", "zero")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn packet_of_u11() {
    let r = json(&["packet", "--a", "1", "--b", "1", "--P", "2"]);
    assert_eq!(r["size"], 1);
    assert_eq!(r["members"][0]["R"], 0);
    assert_eq!(r["members"][0]["poincare_text"], "1 + t^2");
    let table = stdout(&run(&["packet", "--a", "1", "--b", "1", "--P", "2"]));
    assert!(table.contains("((1,1))") && table.contains("1 + t^2"));
}

#[test]
fn csv_has_header_and_rows() {
    let out = stdout(&run(&["packet", "--a", "2", "--b", "2", "--P", "2,1,1", "--format", "csv"]));
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["bipartition", "R", "poincare", "duplicate_of"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let lowest = rows.iter().map(|r| r[1].parse::<u32>().unwrap()).min();
    assert_eq!(lowest, Some(3));
}

#[test]
fn endoscopy_lists_data_and_bijection() {
    let r = json(&["endoscopy", "--N", "4"]);
    assert_eq!(r["data"].as_array().unwrap().len(), 3);
    assert_eq!(r["data"][2]["iota"], "1/4");

    let r = json(&["endoscopy", "--N", "5", "--shape", SHAPE]);
    let entries = r["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    assert_eq!(r["group_order"], 4);
    assert_eq!(entries.iter().filter(|e| e["dominant"] == true).count(), 1);
    assert_eq!(r["dominant"]["n_even_block"], 2);
}

#[test]
fn chains_and_expansion() {
    let r = json(&["chains", "--N", "5", "--shape", SHAPE]);
    assert_eq!(r["count"], 7);
    let expansion = r["expansion"].as_array().unwrap();
    assert_eq!(expansion[0]["coefficient"], "1");
    let dyadic = |s: &str| s.split('/').nth(1).map_or(true, |d| d.parse::<u64>().unwrap().is_power_of_two());
    assert!(expansion.iter().all(|t| dyadic(t["coefficient"].as_str().unwrap())));

    let d = json(&["chains", "--N", "5", "--dominant", "--shape", SHAPE]);
    assert_eq!(d["start"], serde_json::json!([3, 2]));
    assert_eq!(d["count"], 2);
}

#[test]
fn shape_from_file() {
    let path = std::env::temp_dir().join(format!("endoscopylab-shape-{}.json", std::process::id()));
    std::fs::write(&path, SHAPE).unwrap();
    let r = json(&["endoscopy", "--N", "5", "--shape", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(r["entries"].as_array().unwrap().len(), 4);
}

#[test]
fn table_and_json_agree() {
    let r = json(&["sx", "--N", "6", "--k", "2"]);
    let csv_out = stdout(&run(&["sx", "--N", "6", "--k", "2", "--format", "csv"]));
    let line = csv_out.lines().nth(1).unwrap();
    let expected = format!("6,2,{},{},{}", r["theorem_exponent"], r["sx_exponent"], r["holds"]);
    assert_eq!(line, expected);
    let table = stdout(&run(&["sx", "--N", "6", "--k", "2"]));
    assert!(table.lines().nth(2).unwrap().split_whitespace().eq(["6", "2", "12", "14", "true"]));
}

#[test]
fn poincare_and_decay() {
    let r = json(&["poincare", "--bipartition", "[[1,1],[1,0]]"]);
    assert_eq!(r["R"], 1);
    assert_eq!(r["poincare"]["coeffs"], serde_json::json!([0, 1, 0, 1]));

    let d = json(&["decay", "--bipartition", "[[2,2],[1,0]]"]);
    assert_eq!(d["profile"]["ratios"], serde_json::json!(["3/4", "2/3"]));
    assert_eq!(d["profile"]["p_bound"], "8");
}

#[test]
fn derive_json_flag() {
    let out = run(&["derive", "--N", "5", "--a", "2", "--k", "2", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["final_exponent"], 5);
    assert_eq!(v["result"]["steps"].as_array().unwrap().len(), 13);
}

#[test]
fn dominance_is_seeded() {
    let a = stdout(&run(&["dominance", "--shape", SHAPE, "--trials", "50", "--seed", "11", "--format", "json"]));
    let b = stdout(&run(&["dominance", "--shape", SHAPE, "--trials", "50", "--seed", "11", "--format", "json"]));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["result"]["violations"], serde_json::json!([]));
    assert_eq!(v["result"]["trials"], 50);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("8 passed, 0 failed"));
    assert_eq!(text.matches("PASS").count(), 8);
}
