//! Acceptance gate: one PASS/FAIL line per criterion, plus the two worked
//! systems run through the installed binary.

use std::process::Command;

use rpn_geodesics::acceptance::{self, CriterionOutcome};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_rpn-geodesics");

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    let code = out.status.code().expect("exited normally");
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, value)
}

/// Reduction of the three-equation system through the binary: EDN 1 and a
/// final pair `−θ + 1/2, θ + 2/3`, separated by `η = 2/3`.
fn binary_reduction() -> CriterionOutcome {
    let (code, v) = run(&["reduce", "--system", &data("three_equation_system.json"), "--trace"]);
    let result = &v["result"];
    let passed = code == 0
        && v["effective_difference"] == 1
        && v["total_eta"] == "1/2"
        && v["final_eta"] == "2/3"
        && result["P"] == serde_json::json!([[-1], [1]])
        && result["xi"] == serde_json::json!(["1/2", "2/3"])
        && v["steps"].as_array().is_some_and(|s| s.len() == 5);
    CriterionOutcome { id: 1, name: "binary: reduce --trace", passed, detail: format!("exit {code}") }
}

/// The zero-difference system reports EDN 0 and a failed offset condition
/// while still exiting 0.
fn binary_zero_difference() -> CriterionOutcome {
    let (code, v) = run(&["edn", "--system", &data("zero_difference_system.json")]);
    let passed = code == 0
        && v["effective_difference"] == 0
        && v["offset_condition"] == false
        && v["offset_sum"] == "1/2"
        && v["reduction"].is_null();
    CriterionOutcome { id: 2, name: "binary: edn", passed, detail: format!("exit {code}") }
}

fn main() {
    let mut outcomes = acceptance::run_all();
    assert_eq!(outcomes.len(), 10);
    outcomes.push(binary_reduction());
    outcomes.push(binary_zero_difference());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
