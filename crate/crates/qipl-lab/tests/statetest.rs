// SPDX-License-Identifier: MIT OR Apache-2.0

use proptest::prelude::*;
use qipl_lab::circuits::random::{random_prover, random_unitary_verifier};
use qipl_lab::circuits::{snapshots, ActionKind, CircuitAction, Gate, ProverStrategy, Starter, Step, VerifierSpec};
use qipl_lab::linalg::random::random_density;
use qipl_lab::linalg::{c, ComplexMatrix, C64};
use qipl_lab::protocols::{no_instance, InstanceShape};
use qipl_lab::statetest::{
    build_hardness_instance, check_simulator_consistency, decide_indivprod, hardness_alpha, product_distance_bounds,
    run_distance_suite, HardnessParams, IndivProdInstance, IndivProdVerdict, StatePrepCircuit,
};
use qipl_lab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ry(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_real(2, 2, &[co, -s, s, co])
}

fn rotated(theta: f64) -> StatePrepCircuit {
    let g = Gate::Raw { wires: vec![0], matrix: ry(theta) };
    StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, 1, vec![g]).unwrap(), vec![0]).unwrap()
}

/// Trace distance of `RY(a)|0⟩` and `RY(b)|0⟩`, from the pure-state
/// overlap formula.
fn rotated_distance(a: f64, b: f64) -> f64 {
    let overlap = ((a - b) / 2.0).cos();
    (1.0 - overlap * overlap).sqrt()
}

fn zero_prep(n: usize) -> StatePrepCircuit {
    StatePrepCircuit::new(CircuitAction::identity(n), (0..n).collect()).unwrap()
}

fn with_gates(p: &StatePrepCircuit, extra: Vec<Gate>) -> StatePrepCircuit {
    let mut gates = p.circuit().gates.clone();
    gates.extend(extra.into_iter().map(|g| g.map_wires(|w| p.output_qubits()[w])));
    let a = CircuitAction::new(ActionKind::Unitary, p.circuit().in_qubits, gates).unwrap();
    StatePrepCircuit::new(a, p.output_qubits().to_vec()).unwrap()
}

fn honest_views(v: &VerifierSpec, prover: &ProverStrategy) -> Vec<StatePrepCircuit> {
    let mut sims = vec![zero_prep(v.q_m + v.q_w)];
    for snap in snapshots(v, prover).unwrap() {
        if let Step::Prover(_) = snap.step {
            sims.push(StatePrepCircuit::purifying(&snap.state).unwrap());
        }
    }
    sims
}

#[test]
fn decide_examples() {
    let theta = 2.0 * 0.3f64.asin();
    assert!((rotated_distance(theta, 0.0) - 0.3).abs() < 1e-12);
    let inst = IndivProdInstance::new(vec![(rotated(theta), rotated(0.0)), (rotated(0.4), rotated(0.4))], 0.5, 0.1).unwrap();
    let r = decide_indivprod(&inst).unwrap();
    assert_eq!(r.verdict, IndivProdVerdict::Yes { witness: 0 });
    assert!((r.distances[0] - 0.3).abs() < 1e-10 && r.distances[1] < 1e-10);
}

#[test]
fn product_bounds_examples() {
    let pi = std::f64::consts::PI;
    let orth = IndivProdInstance::new(vec![(rotated(0.0), rotated(pi)), (rotated(0.7), rotated(0.7 + pi))], 0.9, 0.1).unwrap();
    let b = product_distance_bounds(&orth).unwrap();
    assert!((b.lower - 1.0).abs() < 1e-10 && (b.upper - 2.0).abs() < 1e-10);
    assert!((b.exact.unwrap() - 1.0).abs() < 1e-10);

    let theta = 2.0 * 0.5f64.asin();
    let half = IndivProdInstance::new(vec![(rotated(theta), rotated(0.0)), (rotated(1.1), rotated(1.1))], 0.9, 0.1).unwrap();
    assert!((product_distance_bounds(&half).unwrap().exact.unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn verdicts_match_constructed_distances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let k = rng.gen_range(1..=3);
        let (alpha, delta) = (0.6, 0.05);
        let yes = rng.gen_bool(0.5);
        let mut targets: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..delta)).collect();
        if yes {
            targets[rng.gen_range(0..k)] = rng.gen_range(alpha / k as f64..1.0);
        }
        let pairs = targets
            .iter()
            .map(|&t| {
                let base = rng.gen_range(0.0..6.0);
                (rotated(base + 2.0 * t.asin()), rotated(base))
            })
            .collect();
        let inst = IndivProdInstance::new(pairs, alpha, delta).unwrap();
        let r = decide_indivprod(&inst).unwrap();
        for (got, want) in r.distances.iter().zip(&targets) {
            assert!((got - want).abs() < 1e-9);
        }
        if yes {
            assert!(matches!(r.verdict, IndivProdVerdict::Yes { .. }));
        } else {
            assert_eq!(r.verdict, IndivProdVerdict::No);
        }
    }
}

#[test]
fn honest_simulator_matches_every_message() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = random_unitary_verifier(1, 1, 3, &mut rng);
    let prover = random_prover(&v, 1, &mut rng);
    let sims = honest_views(&v, &prover);
    let report = check_simulator_consistency(&v, &sims, &prover).unwrap();
    assert_eq!(report.len(), 7);
    assert!(report.iter().all(|m| m.distance <= 1e-8), "{report:?}");

    let h = build_hardness_instance(&v, &sims, &HardnessParams { c: 2.0 / 3.0, s: 1.0 / 3.0, delta: None }).unwrap();
    let r = decide_indivprod(&h.instance).unwrap();
    assert!(r.distances.iter().all(|&t| t <= 1e-8));
    assert_eq!(r.verdict, IndivProdVerdict::No);
    assert!((h.initial_zero_weight - 1.0).abs() < 1e-12);
}

#[test]
fn flipped_private_bit_is_seen_at_message_two() {
    let id = CircuitAction::identity(2);
    let v = VerifierSpec::new(1, 1, vec![id.clone(), id.clone(), id], 1, Starter::Verifier).unwrap();
    let prover = ProverStrategy { q_q: 0, actions: vec![ComplexMatrix::identity(2); 2] };
    let mut sims = honest_views(&v, &prover);
    sims[1] = with_gates(&sims[1], vec![Gate::x(1)]);
    let report = check_simulator_consistency(&v, &sims, &prover).unwrap();
    let at = |m: usize| report.iter().find(|d| d.message == m).unwrap().distance;
    assert!(at(1) < 1e-10);
    assert!((at(2) - 1.0).abs() < 1e-10);
}

#[test]
fn single_round_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = random_unitary_verifier(1, 1, 1, &mut rng);
    let sims = vec![zero_prep(2), zero_prep(2)];
    let err = build_hardness_instance(&v, &sims, &HardnessParams { c: 0.9, s: 0.1, delta: None }).unwrap_err();
    assert!(matches!(err, Error::Argument(_)));
}

/// Views that accept with probability exactly `c` at the end: the last
/// view is the final action undone on `√(1−c)|0…0⟩ + √c|output = 1⟩`.
fn far_side_views(v: &VerifierSpec, c_target: f64, honest_middle: bool, rng: &mut ChaCha8Rng) -> Vec<StatePrepCircuit> {
    let n = v.q_m + v.q_w;
    let l = v.rounds();
    let mut sims = vec![zero_prep(n)];
    for j in 1..l {
        sims.push(if honest_middle {
            with_gates(&sims[j - 1], v.actions[j - 1].gates.clone())
        } else {
            StatePrepCircuit::purifying(&random_density(n, rng.gen_range(1..=1 << n), rng)).unwrap()
        });
    }
    let mut phi: Vec<C64> = vec![c(0.0, 0.0); 1 << n];
    phi[0] = c((1.0 - c_target).sqrt(), 0.0);
    phi[1 << (n - 1 - v.output_qubit)] = c(c_target.sqrt(), 0.0);
    let last = StatePrepCircuit::from_pure_state(&phi).unwrap();
    sims.push(with_gates(&last, v.actions[l].inverse().unwrap().gates));
    sims
}

#[test]
fn far_side_product_distance_meets_bound() {
    let (c_val, s_val) = (2.0 / 3.0, 1.0 / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shape = InstanceShape { q_m: 1, q_w: 1, actions: 4, starts_with: Starter::Verifier };
    let bound = hardness_alpha(c_val, s_val, 3);
    for trial in 0..4 {
        let inst = no_instance(shape, s_val, &mut rng).unwrap();
        assert!(inst.omega <= s_val);
        let sims = far_side_views(&inst.verifier, c_val, trial % 2 == 0, &mut rng);
        let h = build_hardness_instance(&inst.verifier, &sims, &HardnessParams { c: c_val, s: s_val, delta: None }).unwrap();
        assert!(h.acceptance_gap.abs() < 1e-10);
        let b = product_distance_bounds(&h.instance).unwrap();
        let exact = b.exact.unwrap();
        assert!(exact >= bound - 1e-6, "trial {trial}: {exact} < {bound}");
        assert!(b.lower <= exact + 1e-10 && exact <= b.upper + 1e-10);
    }
}

#[test]
fn distance_suite_sample() {
    let r = run_distance_suite(2000, 17).unwrap();
    assert!(r.max_violation() <= 1e-9, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn averaging_and_product_bounds(angles in prop::collection::vec((0.0f64..6.3, 0.0f64..6.3), 1..4)) {
        let pairs = angles.iter().map(|&(a, b)| (rotated(a), rotated(b))).collect();
        let inst = IndivProdInstance::new(pairs, 1.0, 0.0).unwrap();
        let b = product_distance_bounds(&inst).unwrap();
        let exact = b.exact.unwrap();
        prop_assert!(b.lower <= exact + 1e-10);
        prop_assert!(exact <= b.upper + 1e-10);
        prop_assert!(b.lower >= exact / inst.k() as f64 - 1e-10);
        let r = decide_indivprod(&inst).unwrap();
        let far = r.distances.iter().any(|&t| t >= r.threshold);
        let close = r.distances.iter().all(|&t| t <= r.delta);
        prop_assert!(!(far && close));
    }
}
