// SPDX-License-Identifier: MIT OR Apache-2.0
//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use qipl_lab::circuits::random::{random_almost_unitary_verifier, random_unitary_verifier};
use qipl_lab::circuits::{branch_probabilities, ActionKind, CircuitAction, Gate, ProverStrategy, Starter, VerifierSpec};
use qipl_lab::linalg::random::random_density;
use qipl_lab::linalg::{c, ComplexMatrix, C64};
use qipl_lab::oracle::{
    enumerate_classical, enumerate_with_coins, purify_strategy, see_saw_prover, ClassicalProtocol, EnumerationConfig,
    SeeSawConfig,
};
use qipl_lab::protocols::{
    build_sac1_protocol, choose_fingerprint_params, collision_rate_bound, dyadic_threshold, fingerprint,
    honest_3sat_prover, no_instance, parallel_repetition, perfect_completeness_transform, random_sac1_circuit,
    sac1_game_value, scale_acceptance, turn_halving, yes_instance, Cnf3Formula, InstanceShape, ThreeSatProtocol,
};
use qipl_lab::sdp::{check_np_witness, omega, omega_hat, omega_solution, DEFAULT_TOL};
use qipl_lab::statetest::{
    build_hardness_instance, decide_indivprod, hardness_alpha, product_distance_bounds, run_distance_suite,
    HardnessParams, IndivProdInstance, IndivProdVerdict, StatePrepCircuit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sdp_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_gap, mut worst_dual) = (0.0f64, 0.0f64);
    for i in 0..25 {
        let rounds = 1 + i % 2;
        let v = random_unitary_verifier(1, 1, rounds, &mut rng);
        let sol = omega_solution(&v, DEFAULT_TOL).map_err(err)?;
        let ss = see_saw_prover(&v, &SeeSawConfig { rng_seed: i as u64, ..Default::default() }).map_err(err)?;
        let gap = (sol.objective_value - ss.value).abs();
        worst_gap = worst_gap.max(gap);
        worst_dual = worst_dual.max(sol.dual_value - sol.objective_value);
        ensure(gap <= 1e-4, || format!("verifier {i}: sdp {} vs see-saw {}", sol.objective_value, ss.value))?;
        ensure(sol.dual_value - sol.objective_value <= 1e-6, || format!("verifier {i}: duality gap {}", sol.gap))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("25 verifiers, max |sdp - see-saw| {worst_gap:.2e}, max dual - primal {worst_dual:.2e}"))
}

fn all_branches(bits: usize) -> Vec<Vec<bool>> {
    (0..1usize << bits).map(|x| (0..bits).map(|i| x >> (bits - 1 - i) & 1 == 1).collect()).collect()
}

fn sandwich_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..10 {
        let rounds = 1 + i % 2;
        let v = random_almost_unitary_verifier(1, 1, rounds, 1 + i % 2, &mut rng);
        // Measurement records live on private wires, so the deferred-measurement
        // lift has the same value as the measuring verifier.
        let sol = omega_solution(&v.lift_to_isometric(), DEFAULT_TOL).map_err(err)?;
        let w = sol.objective_value;
        let purified = purify_strategy(&v, &sol).map_err(err)?;
        let searched = see_saw_prover(&v, &SeeSawConfig { rng_seed: i as u64, ..Default::default() }).map_err(err)?;
        let provers: [&ProverStrategy; 2] = [&purified, &searched.strategy];
        let contributions = provers.map(|p| branch_probabilities(&v, p));
        let bits: usize = v.measured_counts().iter().sum();
        for u in all_branches(bits) {
            let hat = omega_hat(&v, &u, DEFAULT_TOL).map_err(err)?.objective_value;
            let key: String = u.iter().map(|&b| if b { '1' } else { '0' }).collect();
            for contrib in &contributions {
                let part = contrib.as_ref().map_err(err)?.get(&key).map_or(0.0, |s| s.weight());
                worst = worst.max(part - hat).max(hat - w);
                ensure(part <= hat + 1e-4, || format!("verifier {i} branch {key}: contribution {part} > {hat}"))?;
            }
            ensure(hat <= w + 1e-4, || format!("verifier {i} branch {key}: branch value {hat} > {w}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} branches over 10 verifiers, worst excess {worst:.2e}"))
}

fn perfect_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let (c_val, s_val) = (2.0 / 3.0, 1.0 / 3.0);
    let (num, exp) = dyadic_threshold(c_val, s_val).map_err(err)?;
    let alpha = num as f64 / (1u64 << exp) as f64;
    let no_bound = 1.0 - (c_val - s_val).powi(2) / 2.0;
    let (mut min_yes, mut max_no) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..10 {
        let yes = yes_instance(InstanceShape::default(), c_val, alpha, &mut rng).map_err(err)?;
        let wy = omega(&perfect_completeness_transform(&yes.verifier, c_val, s_val).map_err(err)?).map_err(err)?;
        min_yes = min_yes.min(wy);
        ensure(wy >= 1.0 - 1e-6, || format!("yes verifier {i} (value {}): transformed {wy}", yes.omega))?;
        let no = no_instance(InstanceShape::default(), s_val, &mut rng).map_err(err)?;
        let wn = omega(&perfect_completeness_transform(&no.verifier, c_val, s_val).map_err(err)?).map_err(err)?;
        max_no = max_no.max(wn);
        ensure(wn <= no_bound + 1e-6, || format!("no verifier {i} (value {}): transformed {wn}", no.omega))?;
    }
    Ok(format!("yes side min {min_yes:.8}, no side max {max_no:.6} <= {no_bound:.6}"))
}

fn parallel_multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let base = random_unitary_verifier(1, 1, 1, &mut rng);
        let v = scale_acceptance(&base, rng.gen_range(0.3..0.9)).map_err(err)?;
        let w = omega(&v).map_err(err)?;
        let w2 = omega(&parallel_repetition(&v, 2).map_err(err)?).map_err(err)?;
        worst = worst.max((w2 - w * w).abs());
        ensure((w2 - w * w).abs() <= 1e-5, || format!("verifier {i}: {w2} vs {}", w * w))?;
    }
    Ok(format!("10 verifiers, max |value(V x V) - value(V)^2| {worst:.2e}"))
}

/// Random unitary verifier in which the prover speaks first.
fn prover_first(actions: usize, rng: &mut ChaCha8Rng) -> VerifierSpec {
    let mut v = random_unitary_verifier(1, 1, actions, rng);
    v.actions.remove(0);
    v.starts_with = Starter::Prover;
    v
}

fn turn_halving_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut complete = Vec::new();
    for _ in 0..50 {
        if complete.len() == 4 {
            break;
        }
        let v = prover_first(3, &mut rng);
        let w = omega(&v).map_err(err)?;
        if w >= 1.0 - 1e-7 {
            complete.push((v, w));
        }
    }
    ensure(complete.len() == 4, || "too few complete 5-turn verifiers".into())?;
    let mut min_complete = f64::INFINITY;
    let mut margin = f64::INFINITY;
    let mut at_sixteenth = None;
    for (i, (v, w)) in complete.iter().enumerate() {
        let h = omega(&turn_halving(v).map_err(err)?).map_err(err)?;
        min_complete = min_complete.min(h);
        ensure(h >= 1.0 - 1e-6, || format!("complete verifier {i} halves to {h}"))?;
        let target = if i == 0 { 1.0 / 16.0 } else { rng.gen_range(0.05..0.6) };
        let sv = scale_acceptance(v, target / w).map_err(err)?;
        let s = omega(&sv).map_err(err)?;
        let hs = omega(&turn_halving(&sv).map_err(err)?).map_err(err)?;
        let bound = (1.0 + s.sqrt()) / 2.0;
        margin = margin.min(bound - hs);
        ensure(hs <= bound + 1e-6, || format!("verifier {i} with value {s}: halved {hs} > {bound}"))?;
        if i == 0 {
            ensure((s - 1.0 / 16.0).abs() < 1e-6, || format!("scaled value {s}"))?;
            ensure(hs <= 0.625 + 1e-6, || format!("s = 1/16 halves to {hs}"))?;
            at_sixteenth = Some(hs);
        }
    }
    Ok(format!(
        "complete min {min_complete:.8}; sound side min margin {margin:.2e}; s = 1/16 gives {:.6} <= 0.625",
        at_sixteenth.unwrap_or(f64::NAN)
    ))
}

fn three_sat() -> Outcome {
    let f = Cnf3Formula::new(4, vec![[1, 2, 3], [-4, -2, 3], [4, -1, -3]]).map_err(err)?;
    let assignment = f.satisfying_assignment().ok_or("example formula is satisfiable")?;
    let proto = ThreeSatProtocol::new(f.clone()).map_err(err)?;
    let tr = honest_3sat_prover(&f, &assignment).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..100 {
        let params = proto.sample_coin(&mut rng);
        let verdict = proto.verify_transcript(&params, &tr);
        ensure(verdict.accept, || format!("honest transcript rejected at {params:?}"))?;
    }
    let toys = [
        Cnf3Formula::new(1, vec![[1, 1, 1], [-1, -1, -1]]),
        Cnf3Formula::new(2, vec![[1, 1, 2], [-1, -1, 2], [-2, -2, -2]]),
        Cnf3Formula::new(2, vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2]]),
        Cnf3Formula::new(3, vec![[1, 1, 1], [-1, 2, 2], [-2, 3, 3], [-3, -3, -3]]),
    ];
    let mut values = Vec::new();
    for toy in toys {
        let toy = toy.map_err(err)?;
        ensure(toy.satisfying_assignment().is_none(), || "toy formula is satisfiable".into())?;
        let proto = ThreeSatProtocol::new(toy).map_err(err)?;
        let coins: Vec<_> = (0..512).map(|_| (proto.sample_coin(&mut rng), 1.0 / 512.0)).collect();
        let (value, _, _) = enumerate_with_coins(&proto, &coins, 10_000_000).map_err(err)?;
        let collisions = proto.collision_acceptance(&coins).map_err(err)?;
        ensure(value == collisions, || format!("enumerated {value} vs collision frequency {collisions}"))?;
        values.push(value);
    }
    let (b, ell) = (7u32, 9u64);
    let a: Vec<u64> = (0..9).collect();
    let mut other = a.clone();
    other[8] = 9;
    let draws = 10_000;
    let mut hits = 0;
    for _ in 0..draws {
        let p = choose_fingerprint_params(b, ell, &mut rng).map_err(err)?;
        hits += (fingerprint(&a, &p).map_err(err)? == fingerprint(&other, &p).map_err(err)?) as usize;
    }
    let rate = hits as f64 / draws as f64;
    let bound = collision_rate_bound(b, ell);
    ensure(rate <= 10.0 * bound, || format!("collision rate {rate} > 10 x {bound}"))?;
    Ok(format!("honest 100/100; unsat values {values:?} equal collision frequencies; rate {rate:.4} <= 10 x {bound:.4}"))
}

fn sac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let (mut yes, mut no) = (0, 0);
    for i in 0..500 {
        let inputs = rng.gen_range(1..=4);
        let circuit = random_sac1_circuit(inputs, rng.gen_range(1..=12), &mut rng).map_err(err)?;
        let input: Vec<bool> = (0..inputs).map(|_| rng.gen()).collect();
        let exact = sac1_game_value(&circuit, &input).map_err(err)?;
        let proto = build_sac1_protocol(&circuit, &input).map_err(err)?;
        let r = enumerate_classical(&proto, &EnumerationConfig::default()).map_err(err)?;
        let as_f64 = *exact.numer() as f64 / *exact.denom() as f64;
        ensure(r.value == as_f64, || format!("circuit {i}: enumerated {} vs game value {exact}", r.value))?;
        if circuit.evaluate(&input).map_err(err)? {
            yes += 1;
            ensure(exact == Rational64::from_integer(1), || format!("circuit {i}: yes instance has value {exact}"))?;
        } else {
            no += 1;
            let cap = Rational64::from_integer(1) - Rational64::new(1, 1i64 << circuit.depth());
            ensure(exact <= cap, || format!("circuit {i}: no instance value {exact} > {cap}"))?;
        }
    }
    Ok(format!("500 circuits ({yes} yes, {no} no), enumeration equals game value on all"))
}

fn np_witness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..5 {
        let v = random_almost_unitary_verifier(1, 1, 1 + i % 2, 1, &mut rng);
        let bits: usize = v.measured_counts().iter().sum();
        let u: Vec<bool> = (0..bits).map(|_| rng.gen()).collect();
        let sol = omega_hat(&v, &u, DEFAULT_TOL).map_err(err)?;
        let c_val = sol.objective_value;
        let verdict = check_np_witness(&v, &u, &sol.blocks, c_val);
        ensure(verdict.is_accept(), || format!("verifier {i}: extracted witness rejected: {verdict:?}"))?;
        accepted += 1;
        for _ in 0..10 {
            let mut blocks = sol.blocks.clone();
            let b = rng.gen_range(0..blocks.len());
            let dim = blocks[b].rows();
            let (r, col) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
            let delta: C64 = if r == col {
                c(if rng.gen() { 1e-2 } else { -1e-2 }, 0.0)
            } else {
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                c(1e-2 * phase.cos(), 1e-2 * phase.sin())
            };
            blocks[b][(r, col)] += delta;
            let verdict = check_np_witness(&v, &u, &blocks, c_val);
            ensure(!verdict.is_accept(), || format!("verifier {i}: perturbed entry ({r}, {col}) of block {b} accepted"))?;
            rejected += 1;
        }
    }
    Ok(format!("{accepted} extracted witnesses accepted, {rejected}/50 perturbations rejected"))
}

fn zero_prep(n: usize) -> StatePrepCircuit {
    StatePrepCircuit::new(CircuitAction::identity(n), (0..n).collect()).expect("identity preparation")
}

fn with_gates(p: &StatePrepCircuit, extra: Vec<Gate>) -> Result<StatePrepCircuit, String> {
    let mut gates = p.circuit().gates.clone();
    gates.extend(extra.into_iter().map(|g| g.map_wires(|w| p.output_qubits()[w])));
    let a = CircuitAction::new(ActionKind::Unitary, p.circuit().in_qubits, gates).map_err(err)?;
    StatePrepCircuit::new(a, p.output_qubits().to_vec()).map_err(err)
}

/// Simulated views ending in a state the final action accepts with
/// probability exactly `c_val`.
fn tuned_views(v: &VerifierSpec, c_val: f64, honest: bool, rng: &mut ChaCha8Rng) -> Result<Vec<StatePrepCircuit>, String> {
    let n = v.q_m + v.q_w;
    let l = v.rounds();
    let mut sims = vec![zero_prep(n)];
    for j in 1..l {
        sims.push(if honest {
            with_gates(&sims[j - 1], v.actions[j - 1].gates.clone())?
        } else {
            StatePrepCircuit::purifying(&random_density(n, rng.gen_range(1..=1 << n), rng)).map_err(err)?
        });
    }
    let mut phi: Vec<C64> = vec![c(0.0, 0.0); 1 << n];
    phi[0] = c((1.0 - c_val).sqrt(), 0.0);
    phi[1 << (n - 1 - v.output_qubit)] = c(c_val.sqrt(), 0.0);
    let last = StatePrepCircuit::from_pure_state(&phi).map_err(err)?;
    sims.push(with_gates(&last, v.actions[l].inverse().map_err(err)?.gates)?);
    Ok(sims)
}

fn ry(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(2, 2, &[co, -s, s, co])
}

fn rotated(theta: f64) -> Result<StatePrepCircuit, String> {
    let g = Gate::Raw { wires: vec![0], matrix: ry(theta) };
    StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, 1, vec![g]).map_err(err)?, vec![0]).map_err(err)
}

fn hardness_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let (c_val, s_val) = (2.0 / 3.0, 1.0 / 3.0);
    let bound = hardness_alpha(c_val, s_val, 3);
    let shape = InstanceShape { q_m: 1, q_w: 1, actions: 4, starts_with: Starter::Verifier };
    let mut min_exact = f64::INFINITY;
    let mut averaging_checked = 0;
    for trial in 0..6 {
        let inst = no_instance(shape, s_val, &mut rng).map_err(err)?;
        let sims = tuned_views(&inst.verifier, c_val, trial % 2 == 0, &mut rng)?;
        let params = HardnessParams { c: c_val, s: s_val, delta: None };
        let h = build_hardness_instance(&inst.verifier, &sims, &params).map_err(err)?;
        ensure(h.acceptance_gap.abs() < 1e-9, || format!("final acceptance {}", h.final_acceptance))?;
        let b = product_distance_bounds(&h.instance).map_err(err)?;
        let exact = b.exact.ok_or("product too large for the exact distance")?;
        min_exact = min_exact.min(exact);
        ensure(exact >= bound - 1e-6, || format!("trial {trial}: product distance {exact} < {bound}"))?;
        ensure(b.lower >= exact / h.instance.k() as f64 - 1e-12, || format!("trial {trial}: averaging fails"))?;
        averaging_checked += 1;
    }
    let mut agree = 0;
    for i in 0..50 {
        let k = rng.gen_range(1..=3);
        let (alpha, delta) = (0.6, 0.05);
        let far = rng.gen_bool(0.5);
        let mut targets: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..delta)).collect();
        if far {
            targets[rng.gen_range(0..k)] = rng.gen_range(alpha / k as f64..1.0);
        }
        let mut pairs = Vec::new();
        for &t in &targets {
            let base = rng.gen_range(0.0..6.0);
            pairs.push((rotated(base + 2.0 * t.asin())?, rotated(base)?));
        }
        let inst = IndivProdInstance::new(pairs, alpha, delta).map_err(err)?;
        let r = decide_indivprod(&inst).map_err(err)?;
        let expected_yes = targets.iter().any(|&t| t >= alpha / k as f64);
        let ok = match r.verdict {
            IndivProdVerdict::Yes { witness } => expected_yes && targets[witness] >= alpha / k as f64,
            IndivProdVerdict::No => !expected_yes,
            IndivProdVerdict::PromiseViolation => false,
        };
        ensure(ok, || format!("instance {i}: verdict {:?} for distances {targets:?}", r.verdict))?;
        agree += 1;
        let b = product_distance_bounds(&inst).map_err(err)?;
        let exact = b.exact.ok_or("product too large")?;
        ensure(b.lower >= exact / k as f64 - 1e-12, || format!("instance {i}: averaging fails"))?;
        averaging_checked += 1;
    }
    Ok(format!(
        "min product distance {min_exact:.5} >= {bound:.5}; {agree}/50 verdicts match; averaging held on {averaging_checked} instances"
    ))
}

fn distance_suite() -> Outcome {
    let report = run_distance_suite(10_000, 1010).map_err(err)?;
    let worst = report.max_violation();
    ensure(worst <= 1e-9, || format!("{:?}", report.checks))?;
    Ok(format!("10000 samples, {} inequalities, max violation {worst:.2e}", report.checks.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sdp and explicit prover agree", sdp_oracle_agreement),
        ("branch values sandwiched", sandwich_bound),
        ("perfect completeness transform", perfect_completeness),
        ("parallel repetition multiplies values", parallel_multiplicativity),
        ("turn halving", turn_halving_bounds),
        ("3-SAT fingerprint protocol", three_sat),
        ("semi-unbounded circuit game", sac1),
        ("witness check", np_witness),
        ("simulated views to state pairs", hardness_chain),
        ("distance inequalities", distance_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
