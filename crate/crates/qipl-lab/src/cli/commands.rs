// SPDX-License-Identifier: MIT OR Apache-2.0
//! One function per subcommand.

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{failure, load_verifier, parse_bits, parse_stage, read, Cli, Command, Exit, Outcome};
use crate::circuits::VerifierSpec;
use crate::error::Error;
use crate::linalg::ComplexMatrix;
use crate::oracle::{enumerate_classical, enumerate_with_coins, see_saw_prover, ClassicalProtocol, EnumerationConfig, SeeSawConfig};
use crate::protocols::{
    build_sac1_protocol, choose_fingerprint_params, honest_3sat_prover, sac1_game_value, Cnf3Formula, Sac1Circuit,
    ThreeSatProtocol,
};
use crate::sdp::{check_np_witness, omega_hat, omega_solution, WitnessVerdict};
use crate::statetest::{decide_indivprod, product_distance_bounds, IndivProdInstance, IndivProdVerdict};

/// Largest gap between the SDP value and the explicit prover that still
/// counts as agreement.
pub const AGREEMENT_TOL: f64 = 1e-4;

/// Tolerance when comparing a stage's value with its expected bound.
const BOUND_TOL: f64 = 1e-6;

/// Strategy cap for classical prover enumeration.
const STRATEGY_CAP: u64 = 10_000_000;

/// Witness file: full-register blocks for one measurement branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    #[serde(default)]
    pub branch: String,
    pub c: f64,
    pub blocks: Vec<ComplexMatrix>,
}

type Res = std::result::Result<Outcome, Outcome>;

trait OrFail<T> {
    fn or_fail(self) -> std::result::Result<T, Outcome>;
}

impl<T> OrFail<T> for crate::error::Result<T> {
    fn or_fail(self) -> std::result::Result<T, Outcome> {
        self.map_err(|e| failure(&e))
    }
}

pub(super) fn dispatch(cli: &Cli) -> Res {
    match &cli.command {
        Command::Omega { verifier, restarts, iterations } => {
            let v = load_verifier(verifier, cli.max_qubits)?;
            omega(&v, cli, *restarts, *iterations)
        }
        Command::Transform { verifier, stages, no_omega } => {
            let v = load_verifier(verifier, cli.max_qubits)?;
            transform(v, stages, !*no_omega, cli)
        }
        Command::Sat { formula, assignment, samples } => {
            let f = read(formula).and_then(|t| Cnf3Formula::from_dimacs(&t)).or_fail()?;
            match (assignment, samples) {
                (Some(a), None) => sat_honest(&f, a, cli.seed),
                (None, Some(n)) => sat_soundness(&f, *n, cli.seed),
                _ => Err(Outcome::new(Exit::Usage, json!({ "error": "give exactly one of --assignment or --samples" }))),
            }
        }
        Command::Sac1 { circuit, input } => {
            let c: Sac1Circuit = read(circuit).and_then(|t| Ok(serde_json::from_str(&t)?)).or_fail()?;
            sac1(&c, &parse_bits(input).or_fail()?, cli.seed)
        }
        Command::Statetest { instance } => {
            let inst: IndivProdInstance = read(instance).and_then(|t| Ok(serde_json::from_str(&t)?)).or_fail()?;
            statetest(&inst)
        }
        Command::Witness { verifier, witness } => {
            let v = load_verifier(verifier, cli.max_qubits)?;
            let w: WitnessFile = read(witness).and_then(|t| Ok(serde_json::from_str(&t)?)).or_fail()?;
            check_witness(&v, &w)
        }
        Command::ExtractWitness { verifier, branch, c } => {
            let v = load_verifier(verifier, cli.max_qubits)?;
            let sol = omega_hat(&v, &parse_bits(branch).or_fail()?, cli.tol).or_fail()?;
            let w = WitnessFile { branch: branch.clone(), c: c.unwrap_or(sol.objective_value), blocks: sol.blocks };
            Ok(Outcome::new(Exit::Ok, json!({ "value": sol.objective_value, "gap": sol.gap, "witness": w })))
        }
    }
}

fn omega(v: &VerifierSpec, cli: &Cli, restarts: usize, iterations: usize) -> Res {
    let sol = omega_solution(v, cli.tol).or_fail()?;
    let cfg = SeeSawConfig { restarts, iterations, prover_qubits: None, rng_seed: cli.seed };
    let seesaw = see_saw_prover(v, &cfg).or_fail()?;
    let gap = sol.objective_value - seesaw.value;
    let agree = gap.abs() <= AGREEMENT_TOL;
    Ok(Outcome::new(
        if agree { Exit::Ok } else { Exit::Disagreement },
        json!({
            "omega_sdp": sol.objective_value,
            "dual": sol.dual_value,
            "seesaw": seesaw.value,
            "gap": gap,
            "solver_gap": sol.gap,
            "iterations": sol.iterations,
            "agree": agree,
            "content_hash": v.content_hash(),
        }),
    ))
}

fn transform(mut v: VerifierSpec, stages: &[String], with_omega: bool, cli: &Cli) -> Res {
    let parsed = stages
        .iter()
        .map(|s| parse_stage(s))
        .collect::<crate::error::Result<Vec<_>>>()
        .or_fail()?;
    let value = |v: &VerifierSpec| omega_solution(v, cli.tol).map(|s| s.objective_value);
    let mut before = if with_omega { Some(value(&v).or_fail()?) } else { None };
    let initial = before;
    let mut reports = Vec::new();
    let mut all_hold = true;
    for (i, stage) in parsed.iter().enumerate() {
        let next = match stage.apply(&v) {
            Ok(next) => next,
            Err(e) => {
                return Err(Outcome::new(
                    Exit::Stage,
                    json!({ "error": e.to_string(), "stage": i, "transform": stage.name(), "completed": reports }),
                ))
            }
        };
        let after = if with_omega { Some(value(&next).or_fail()?) } else { None };
        let bound = before.and_then(|b| stage.bound(b, BOUND_TOL));
        let holds = match (&bound, after) {
            (Some(b), Some(a)) if b.relation == "equal" => Some((a - b.value).abs() <= BOUND_TOL),
            (Some(b), Some(a)) => Some(a <= b.value + BOUND_TOL),
            _ => None,
        };
        all_hold &= holds != Some(false);
        reports.push(json!({
            "stage": i,
            "spec": stage,
            "omega_before": before,
            "omega": after,
            "bound": bound,
            "holds": holds,
            "qubits": next.n_qubits(),
            "turns": next.num_turns(),
        }));
        v = next;
        before = after;
    }
    Ok(Outcome::new(
        if all_hold { Exit::Ok } else { Exit::Disagreement },
        json!({ "omega_input": initial, "stages": reports, "verifier": v }),
    ))
}

fn sat_honest(f: &Cnf3Formula, assignment: &str, seed: u64) -> Res {
    let bits = parse_bits(assignment).or_fail()?;
    if bits.len() != f.num_vars {
        return Err(failure(&Error::Argument(format!(
            "assignment has {} values, formula has {} variables",
            bits.len(),
            f.num_vars
        ))));
    }
    let transcript = match honest_3sat_prover(f, &bits) {
        Ok(t) => t,
        Err(Error::Precondition(m)) => return Ok(Outcome::new(Exit::No, json!({ "accept": false, "reason": m }))),
        Err(e) => return Err(failure(&e)),
    };
    let protocol = ThreeSatProtocol::new(f.clone()).or_fail()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = choose_fingerprint_params(protocol.encoding.b, protocol.encoding.ell, &mut rng).or_fail()?;
    let verdict = protocol.verify_transcript(&params, &transcript);
    Ok(Outcome::new(
        if verdict.accept { Exit::Ok } else { Exit::No },
        json!({ "accept": verdict.accept, "params": params, "verdict": verdict, "transcript": transcript }),
    ))
}

fn sat_soundness(f: &Cnf3Formula, samples: usize, seed: u64) -> Res {
    if samples == 0 {
        return Err(failure(&Error::Argument("--samples must be positive".into())));
    }
    let protocol = ThreeSatProtocol::new(f.clone()).or_fail()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coins: Vec<_> = (0..samples).map(|_| protocol.sample_coin(&mut rng)).collect();
    let mut per_key = Vec::with_capacity(samples);
    for &coin in &coins {
        let (value, _, _) = enumerate_with_coins(&protocol, &[(coin, 1.0)], STRATEGY_CAP).or_fail()?;
        per_key.push(json!({ "p": coin.p, "r": coin.r, "max_acceptance": value }));
    }
    let weighted: Vec<_> = coins.iter().map(|&c| (c, 1.0 / samples as f64)).collect();
    let (value, strategies, _) = enumerate_with_coins(&protocol, &weighted, STRATEGY_CAP).or_fail()?;
    let aggregate = per_key.iter().map(|k| k["max_acceptance"].as_f64().unwrap_or(0.0)).sum::<f64>() / samples as f64;
    Ok(Outcome::new(
        Exit::Ok,
        json!({
            "satisfiable": f.satisfying_assignment().is_some(),
            "samples": samples,
            "per_key": per_key,
            "aggregate": aggregate,
            "best_single_prover": value,
            "strategies": strategies,
        }),
    ))
}

fn sac1(c: &Sac1Circuit, input: &[bool], seed: u64) -> Res {
    let value: Rational64 = sac1_game_value(c, input).or_fail()?;
    let protocol = build_sac1_protocol(c, input).or_fail()?;
    let cfg = EnumerationConfig { seed, ..EnumerationConfig::default() };
    let enumerated = enumerate_classical(&protocol, &cfg).or_fail()?;
    let exact = matches!(enumerated.coins, crate::oracle::CoinMode::Exact { .. });
    let as_f64 = *value.numer() as f64 / *value.denom() as f64;
    let agree = !exact || (enumerated.value - as_f64).abs() <= 1e-12;
    let exit = if !agree {
        Exit::Disagreement
    } else if value == Rational64::from_integer(1) {
        Exit::Ok
    } else {
        Exit::No
    };
    Ok(Outcome::new(
        exit,
        json!({
            "value": format!("{value}"),
            "value_f64": as_f64,
            "evaluates_true": c.evaluate(input).or_fail()?,
            "depth": c.depth(),
            "enumerated": enumerated,
            "agree": agree,
        }),
    ))
}

fn statetest(inst: &IndivProdInstance) -> Res {
    let report = decide_indivprod(inst).or_fail()?;
    let bounds = product_distance_bounds(inst).or_fail()?;
    let exit = match report.verdict {
        IndivProdVerdict::Yes { .. } => Exit::Ok,
        IndivProdVerdict::No => Exit::No,
        IndivProdVerdict::PromiseViolation => Exit::PromiseViolation,
    };
    Ok(Outcome::new(exit, json!({ "report": report, "bounds": bounds })))
}

fn check_witness(v: &VerifierSpec, w: &WitnessFile) -> Res {
    let verdict = check_np_witness(v, &parse_bits(&w.branch).or_fail()?, &w.blocks, w.c);
    let exit = if verdict.is_accept() { Exit::Ok } else { Exit::No };
    Ok(Outcome::new(exit, json!({ "accept": matches!(verdict, WitnessVerdict::Accept { .. }), "verdict": verdict })))
}

