use std::process::{Command, Output};

use rpn_geodesics::acceptance::{rp3_model, single_bumpy_model, three_equation_system, zero_difference_system, resonant_mean_index};
use rpn_geodesics::interval::Rank1Model;
use rpn_geodesics::normal_form::GeodesicModel;
use rpn_geodesics::systems::IrrationalSystem;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_rpn-geodesics");

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("rpn-geodesics-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn data_files_match_builtin_inputs() {
    let sys = IrrationalSystem::from_json(&read("three_equation_system.json")).unwrap();
    assert_eq!(sys.equations(), three_equation_system().equations());
    let sys = IrrationalSystem::from_json(&read("zero_difference_system.json")).unwrap();
    assert_eq!(sys.equations(), zero_difference_system().equations());
    assert_eq!(Rank1Model::from_json(&read("rp3_model.json")).unwrap(), rp3_model());
    let g = GeodesicModel::from_json(&read("bumpy_rp3_model.json")).unwrap();
    assert_eq!(g, single_bumpy_model(3, &resonant_mean_index(3)).unwrap());
}

#[test]
fn betti_table_for_rp4() {
    let out = run(&["betti", "--n", "4", "--max-q", "12", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("q,betti"));
    assert_eq!(text.lines().last(), Some("12,2"));
    let v = stdout_json(&["betti", "--n", "4", "--max-q", "12"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 13);
}

#[test]
fn index_table_lists_every_iterate() {
    let v = stdout_json(&["index", "--model", &data("bumpy_rp3_model.json"), "--max-m", "8"]);
    let rows = v["iterates"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["m"], 1);
    assert_eq!(rows[0]["index"], 0);
    assert_eq!(v["mean_index"], "1/2");
}

#[test]
fn resonance_file_satisfies_identity() {
    let v = stdout_json(&["resonance", "--models", &data("single_geodesic_rp3.json")]);
    assert_eq!(v["full"]["holds"], true);
    assert_eq!(v["full"]["residual"], "0");
    assert_eq!(v["bumpy"]["holds"], true);
}

#[test]
fn obstruction_on_rp3_model() {
    let v = stdout_json(&["obstruction", "--model", &data("rp3_model.json")]);
    assert_eq!(v["conflict"], true);
    assert_eq!(v["routes_agree"], true);
    assert_eq!(v["witness_eta"], "1/4");
    assert_eq!(v["step"], 16);
}

#[test]
fn reduce_without_trace_omits_steps() {
    let v = stdout_json(&["reduce", "--system", &data("three_equation_system.json")]);
    assert_eq!(v["steps"], serde_json::json!([]));
    assert_eq!(v["effective_difference"], 1);
}

#[test]
fn kronecker_found_and_exhausted() {
    let v = stdout_json(&["kronecker", "--thetas", "sqrt(2) - 1", "--box", "0,1/4"]);
    assert_eq!(v["outcome"], "found");
    // {√2 − 1} ≈ 0.414, {2(√2 − 1)} ≈ 0.828, {3(√2 − 1)} ≈ 0.243
    assert_eq!(v["m"], 3);
    let out = run(&["kronecker", "--thetas", "sqrt(2)", "--box", "0,1/1000000", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(5));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "not_found");
    assert_eq!(v["scanned"], 10);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["betti", "--n", "1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["edn", "--system", "/definitely/missing.json"]), 1);
    let bad = temp_file("bad.json", r#"{"P": 1}"#);
    assert_eq!(code(&["edn", "--system", &bad]), 3);
    assert_eq!(code(&["kronecker", "--thetas", "sqrt(x)", "--box", "0,1"]), 3);
    // zero-difference system passes edn but fails the reduction preconditions
    assert_eq!(code(&["edn", "--system", &data("zero_difference_system.json")]), 0);
    assert_eq!(code(&["reduce", "--system", &data("zero_difference_system.json")]), 4);
    let rational = temp_file("rational.json", r#"{"n": 1, "theta": "1/3", "p": [1, -1], "xi": ["1/2", "3/4"]}"#);
    assert_eq!(code(&["obstruction", "--model", &rational]), 4);
    assert_eq!(code(&["obstruction", "--model", &data("rp3_model.json"), "--budget", "5"]), 5);
}

#[test]
fn output_is_deterministic() {
    let args = ["obstruction", "--model", &data("rp3_model.json")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["reduce", "--system", &data("three_equation_system.json"), "--trace"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
