// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn enrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enrel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("enrel-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bound_prints_theorem_and_corollary_rows() {
    let o = enrel(&["bound", "--n", "4", "--k", "2", "--delta", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,delta,model,kind,bound,bound_per_input,flag");
    assert!(lines[1].starts_with("4,2,0.1,exp:0.5:1,theorem1,3.687"), "{}", lines[1]);
    assert!(lines[2].contains(",corollary1,"));
}

#[test]
fn bound_scaling_and_json() {
    let o = enrel(&["bound", "--k", "2", "--scaling", "4,16,256", "--delta", "0.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert_eq!(v[0]["kind"], "theorem1");
}

#[test]
fn bound_usage_errors() {
    assert_eq!(enrel(&["bound", "--n", "4", "--k", "4", "--delta", "0.1"]).status.code(), Some(2));
    assert_eq!(enrel(&["bound", "--circuit", "line:3:AND", "--n", "4", "--delta", "0.1"]).status.code(), Some(2));
    assert_eq!(enrel(&["bound", "--n", "4", "--k", "2", "--delta", "0.7"]).status.code(), Some(2));
    assert_eq!(
        enrel(&["bound", "--n", "4", "--k", "2", "--delta", "0.1", "--model", "exp:2:1"]).status.code(),
        Some(2)
    );
}

#[test]
fn alloc_line_is_uniform() {
    let o = enrel(&["alloc", "--circuit", "line:3:AND", "--gamma", "0.15"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["certified"], true);
    for g in v["gates"].as_array().unwrap() {
        assert!((g["eps"].as_f64().unwrap() - 0.05).abs() < 1e-9);
    }
}

#[test]
fn alloc_budget_reports_target() {
    let o = enrel(&["alloc", "--circuit", "balanced:2:1:AND", "--budget", "5.5215"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["y_min"].as_f64().unwrap() - 0.15).abs() < 1e-4);
    assert!((v["delta_min"].as_f64().unwrap() - 0.0945).abs() < 1e-3);
    assert!(v["eth"].as_f64().unwrap() < 5.5215);
}

#[test]
fn alloc_rejects_bad_requests() {
    // Below the threshold energy.
    assert_eq!(enrel(&["alloc", "--circuit", "line:3:AND", "--budget", "2"]).status.code(), Some(2));
    // Exactly one goal.
    assert_eq!(enrel(&["alloc", "--circuit", "line:3:AND", "--gamma", "0.1", "--budget", "9"]).status.code(), Some(2));
    assert_eq!(enrel(&["alloc", "--circuit", "line:3:AND"]).status.code(), Some(2));
    assert_eq!(enrel(&["alloc", "--circuit", "line:3:AND", "--gamma", "0.1", "--eta", "0.5"]).status.code(), Some(2));
    assert_eq!(enrel(&["alloc", "--circuit", "line:3:AND", "--gamma", "0.1", "--theta", "0.5"]).status.code(), Some(2));
    assert_eq!(enrel(&["alloc", "--circuit", "/no/such/file.json", "--gamma", "0.1"]).status.code(), Some(2));
}

#[test]
fn evaluate_parity_from_allocation_file() {
    let alloc = scratch("alloc.json");
    let o = enrel(&["alloc", "--circuit", "balanced:2:1:XOR", "--delta", "0.1", "--out", alloc.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = enrel(&[
        "evaluate",
        "--circuit",
        "balanced:2:1:XOR",
        "--allocation",
        alloc.to_str().unwrap(),
        "--audit",
        "0,3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let closed = v["parity_closed_form"].as_f64().unwrap();
    assert_eq!(v["per_input_error"].as_array().unwrap().len(), 16);
    assert!((v["worst_delta"].as_f64().unwrap() - closed).abs() < 1e-12);
    assert_eq!(v["audit"].as_array().unwrap().len(), 2);
    assert_eq!(v["audit"][0]["fano_ok"], true);
}

#[test]
fn evaluate_broadcasts_single_eps() {
    let o = enrel(&["evaluate", "--circuit", "line:3:XOR", "--eps", "0.1"]);
    let v = json(&o);
    let expect = 0.5 * (1.0 - 0.8f64.powi(3));
    assert!((v["worst_delta"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert_eq!(enrel(&["evaluate", "--circuit", "line:3:XOR", "--eps", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_is_sorted_and_deterministic() {
    let args = ["sweep", "--grid", "2:12:11", "--kinds", "AND,OR,XOR"];
    let a = enrel(&args);
    let b = enrel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
    let text = stdout(&a);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert_eq!(&header[0], "gridpoint");
    assert_eq!(header.len(), 13);
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 11 * 2 * 3 * 2);
    assert_eq!(&records[0][2], "line");
    assert_eq!(&records[0][5], "below_eth");
}

#[test]
fn gen_output_loads_back() {
    let path = scratch("tree.json");
    assert_eq!(enrel(&["gen", "balanced:3:2:NOR", "--out", path.to_str().unwrap()]).status.code(), Some(0));
    let o = enrel(&["bound", "--circuit", path.to_str().unwrap(), "--delta", "0.05"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("27,3,0.05,"));
}

#[test]
fn validate_model_reports() {
    for m in ["exp:0.5:1", "poly:0.5:2", "sexp:0.5:1:0.5"] {
        let o = enrel(&["validate-model", "--model", m]);
        assert_eq!(o.status.code(), Some(0), "{m}");
        assert_eq!(json(&o)["tail_decays"], true);
    }
    assert_eq!(enrel(&["validate-model", "--model", "sexp:0.5:1:2"]).status.code(), Some(2));
    assert_eq!(enrel(&["validate-model", "--model", "cubic:1"]).status.code(), Some(2));
}
