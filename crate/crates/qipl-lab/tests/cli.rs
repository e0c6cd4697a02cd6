// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::{Path, PathBuf};
use std::process::Command;

use qipl_lab::circuits::random::random_unitary_verifier;
use qipl_lab::circuits::{ActionKind, CircuitAction, Gate, Starter, VerifierSpec};
use qipl_lab::protocols::{no_instance, Cnf3Formula, InstanceShape};
use qipl_lab::statetest::{IndivProdInstance, StatePrepCircuit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_qipl-lab")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn accept_always() -> VerifierSpec {
    let last = CircuitAction::new(ActionKind::Unitary, 2, vec![Gate::x(1)]).unwrap();
    VerifierSpec::new(1, 1, vec![CircuitAction::identity(2), last], 1, Starter::Verifier).unwrap()
}

fn check_schema(report: &Value, command: &str, code: i32) {
    assert_eq!(report["schema"], "qipl-lab.report/1");
    assert_eq!(report["command"], command);
    assert_eq!(report["exit_code"], code);
}

#[test]
fn omega_of_accept_always_is_one() {
    let dir = TempDir::new().unwrap();
    let v = write(&dir, "v.json", &accept_always().to_json());
    let (code, r) = run(&["omega", s(&v)]);
    assert_eq!(code, 0);
    check_schema(&r, "omega", 0);
    assert!((r["result"]["omega_sdp"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let v = write(&dir, "v.json", "{\"q_M\": 1,");
    let (code, r) = run(&["omega", s(&v)]);
    assert_eq!(code, 2);
    assert!(r["result"]["error"].is_string());
    assert_eq!(run(&["omega", "/nonexistent/v.json"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
}

#[test]
fn omega_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let v = random_unitary_verifier(1, 1, 1, &mut ChaCha8Rng::seed_from_u64(5));
    let v = write(&dir, "v.json", &v.to_json());
    let a = run(&["omega", s(&v), "--seed", "3", "--restarts", "2"]);
    let b = run(&["omega", s(&v), "--seed", "3", "--restarts", "2"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
}

#[test]
fn transform_reports_stage_bounds() {
    let dir = TempDir::new().unwrap();
    let inst = no_instance(InstanceShape::default(), 1.0 / 3.0, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let v = write(&dir, "v.json", &inst.verifier.to_json());
    let (code, r) = run(&["transform", s(&v), "--stage", "perfect_completeness:c=2/3,s=1/3"]);
    assert_eq!(code, 0, "{r}");
    let stage = &r["result"]["stages"][0];
    assert!((stage["bound"]["value"].as_f64().unwrap() - 17.0 / 18.0).abs() < 1e-12);
    assert_eq!(stage["holds"], true);

    let (code, r) = run(&["transform", s(&v)]);
    assert_eq!(code, 0);
    let back = VerifierSpec::from_json(&r["result"]["verifier"].to_string()).unwrap();
    assert_eq!(back, inst.verifier);
}

#[test]
fn halving_a_four_turn_verifier_fails_at_its_stage() {
    let dir = TempDir::new().unwrap();
    let v = random_unitary_verifier(1, 1, 2, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(v.num_turns(), 4);
    let v = write(&dir, "v.json", &v.to_json());
    let (code, r) = run(&["transform", s(&v), "--stage", "turn_halving", "--no-omega"]);
    assert_eq!(code, 4);
    assert_eq!(r["result"]["stage"], 0);
    assert_eq!(r["result"]["transform"], "turn_halving");
}

#[test]
fn sat_modes() {
    let dir = TempDir::new().unwrap();
    let example = Cnf3Formula::new(4, vec![[1, 2, 3], [-4, -2, 3], [4, -1, -3]]).unwrap();
    let bits: String = example.satisfying_assignment().unwrap().iter().map(|&b| if b { '1' } else { '0' }).collect();
    let f = write(&dir, "f.cnf", &example.to_dimacs());
    let (code, r) = run(&["sat", s(&f), "--assignment", &bits]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["accept"], true);
    assert_eq!(run(&["sat", s(&f), "--assignment", "01"]).0, 2);

    let unsat = write(&dir, "u.cnf", "p cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n");
    let (code, r) = run(&["sat", s(&unsat), "--samples", "40"]);
    assert_eq!(code, 0);
    assert!(r["result"]["best_single_prover"].as_f64().unwrap() < 1.0);
    assert_eq!(run(&["sat", s(&unsat), "--samples", "0"]).0, 2);
}

#[test]
fn sac1_satisfied_circuit() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"num_inputs": 2, "output": 3, "gates": [
        {"id": 1, "kind": "INPUT", "literal": 1},
        {"id": 2, "kind": "INPUT", "literal": -2},
        {"id": 3, "kind": "AND", "children": [1, 2]}]}"#;
    let c = write(&dir, "c.json", text);
    let (code, r) = run(&["sac1", s(&c), "--input", "10"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["value"], "1");
    let (code, r) = run(&["sac1", s(&c), "--input", "11"]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["value"], "1/2");
}

fn single(gates: Vec<Gate>) -> StatePrepCircuit {
    StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, 1, gates).unwrap(), vec![0]).unwrap()
}

#[test]
fn statetest_verdicts() {
    let dir = TempDir::new().unwrap();
    let yes = IndivProdInstance::new(vec![(single(vec![]), single(vec![Gate::x(0)]))], 0.9, 0.1).unwrap();
    let f = write(&dir, "yes.json", &serde_json::to_string(&yes).unwrap());
    let (code, r) = run(&["statetest", s(&f)]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["report"]["verdict"]["witness"], 0);

    let mid = IndivProdInstance::new(vec![(single(vec![]), single(vec![Gate::H(0)]))], 0.9, 0.1).unwrap();
    let f = write(&dir, "mid.json", &serde_json::to_string(&mid).unwrap());
    assert_eq!(run(&["statetest", s(&f)]).0, 5);

    let same = IndivProdInstance::new(vec![(single(vec![]), single(vec![]))], 0.9, 0.1).unwrap();
    let f = write(&dir, "no.json", &serde_json::to_string(&same).unwrap());
    assert_eq!(run(&["statetest", s(&f)]).0, 1);
}

#[test]
fn extracted_witness_accepted_and_corruption_rejected() {
    let dir = TempDir::new().unwrap();
    let v = random_unitary_verifier(1, 1, 1, &mut ChaCha8Rng::seed_from_u64(12));
    let vf = write(&dir, "v.json", &v.to_json());
    let (code, r) = run(&["extract-witness", s(&vf)]);
    assert_eq!(code, 0, "{r}");
    let mut w = r["result"]["witness"].clone();
    let value = r["result"]["value"].as_f64().unwrap();
    w["c"] = Value::from(value - 1e-6);
    let wf = write(&dir, "w.json", &w.to_string());
    let (code, r) = run(&["witness", s(&vf), s(&wf)]);
    assert_eq!(code, 0, "{r}");

    let entry = &mut w["blocks"][0][0][0];
    let re = entry[0].as_f64().unwrap();
    entry[0] = Value::from(re + 1e-2);
    let wf = write(&dir, "bad.json", &w.to_string());
    let (code, r) = run(&["witness", s(&vf), s(&wf)]);
    assert_eq!(code, 1);
    assert_eq!(r["result"]["accept"], false);
}
