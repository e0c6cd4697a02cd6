// SPDX-License-Identifier: MIT OR Apache-2.0
use qipl_lab::circuits::random::random_unitary_verifier;
use qipl_lab::circuits::{ActionKind, CircuitAction, Gate, Starter, VerifierSpec};
use qipl_lab::linalg::ComplexMatrix;
use qipl_lab::error::Error;
use qipl_lab::protocols::{
    complement_output, no_instance, yes_instance, InstanceShape,
    parallel_repetition, perfect_completeness_transform, scale_acceptance, sequential_repetition, single_coin_qmaml,
    turn_halving,
};
use qipl_lab::sdp::omega;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random unitary verifier whose first turn is the prover's, with
/// `actions` verifier actions (so `2·actions − 1` turns).
fn prover_first(actions: usize, rng: &mut ChaCha8Rng) -> VerifierSpec {
    let mut v = random_unitary_verifier(1, 1, actions, rng);
    v.actions.remove(0);
    v.starts_with = Starter::Prover;
    v
}

#[test]
fn halving_keeps_completeness_and_meets_soundness_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = prover_first(3, &mut rng);
    assert_eq!(v.num_turns(), 5);
    let w = omega(&v).unwrap();
    assert!(w >= 1.0 - 1e-7);
    let h = turn_halving(&v).unwrap();
    assert_eq!(h.num_turns(), 3);
    assert!(omega(&h).unwrap() >= 1.0 - 1e-6);

    let s = scale_acceptance(&v, 1.0 / (16.0 * w)).unwrap();
    let ws = omega(&s).unwrap();
    assert!((ws - 1.0 / 16.0).abs() < 1e-6);
    let hs = omega(&turn_halving(&s).unwrap()).unwrap();
    assert!(hs <= 0.625 + 1e-6, "halved {hs}");
}

#[test]
fn halving_rejects_wrong_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let four_turn = random_unitary_verifier(1, 1, 2, &mut rng);
    assert!(matches!(turn_halving(&four_turn), Err(Error::Argument(_))));
    assert!(matches!(turn_halving(&prover_first(2, &mut rng)), Err(Error::Argument(_))));
    assert!(matches!(single_coin_qmaml(&prover_first(3, &mut rng)), Err(Error::Argument(_))));
}

#[test]
fn single_coin_on_complete_and_sound_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v = prover_first(2, &mut rng);
    let w = omega(&v).unwrap();
    assert!(w >= 1.0 - 1e-7);
    assert!(omega(&single_coin_qmaml(&v).unwrap()).unwrap() >= 1.0 - 1e-6);
    let s = scale_acceptance(&v, 1.0 / (16.0 * w)).unwrap();
    assert!(omega(&single_coin_qmaml(&s).unwrap()).unwrap() <= 0.625 + 1e-6);
}

#[test]
fn perfect_completeness_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (c, s) = (2.0 / 3.0, 1.0 / 3.0);
    let yes = yes_instance(InstanceShape::default(), c, 0.625, &mut rng).unwrap();
    assert!(yes.omega >= c - 1e-7 && yes.p_min <= 0.625 + 1e-7);
    let pc_yes = perfect_completeness_transform(&yes.verifier, c, s).unwrap();
    assert_eq!(pc_yes.num_turns(), yes.verifier.num_turns() + 2);
    assert!(omega(&pc_yes).unwrap() >= 1.0 - 1e-6);
    assert_eq!(pc_yes.provenance.last().unwrap().transform, "perfect_completeness");
    let no = no_instance(InstanceShape::default(), s, &mut rng).unwrap();
    let pc_no = omega(&perfect_completeness_transform(&no.verifier, c, s).unwrap()).unwrap();
    assert!(pc_no <= 17.0 / 18.0 + 1e-6, "no side {pc_no}");
}

#[test]
fn completeness_needs_a_prover_that_can_reach_alpha() {
    // acceptance is 0.9 whatever the prover does, so it can never be
    // lowered to α = 5/8; the value is the fidelity bound itself
    let p: f64 = 0.9;
    let t = p.sqrt().asin();
    let ry = ComplexMatrix::from_real(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
    let prep = CircuitAction::new(ActionKind::Unitary, 2, vec![Gate::Raw { wires: vec![1], matrix: ry }]).unwrap();
    let v = VerifierSpec::new(1, 1, vec![prep, CircuitAction::identity(2)], 1, Starter::Verifier).unwrap();
    assert!((omega(&v).unwrap() - p).abs() < 1e-6);
    assert!((1.0 - omega(&complement_output(&v).unwrap()).unwrap() - p).abs() < 1e-6);
    let alpha = 0.625;
    let expected = ((1.0 - p) * (1.0 - alpha)).sqrt() + (p * alpha).sqrt();
    let got = omega(&perfect_completeness_transform(&v, 2.0 / 3.0, 1.0 / 3.0).unwrap()).unwrap();
    assert!((got - expected * expected).abs() < 1e-6, "{got}");
}

#[test]
fn repetition_multiplies_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v = scale_acceptance(&random_unitary_verifier(1, 1, 1, &mut rng), 0.5).unwrap();
    let w = omega(&v).unwrap();
    let par = omega(&parallel_repetition(&v, 2).unwrap()).unwrap();
    assert!((par - w * w).abs() < 1e-5);
    let one = omega(&parallel_repetition(&v, 1).unwrap()).unwrap();
    assert!((one - w).abs() < 1e-6);
    let seq = omega(&sequential_repetition(&v, 2).unwrap()).unwrap();
    assert!(seq <= w * w + 1e-4, "sequential {seq} vs {}", w * w);
}

#[test]
fn sequential_repetition_of_a_complete_verifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let v = random_unitary_verifier(1, 1, 1, &mut rng);
    let w = omega(&v).unwrap();
    assert!(w >= 1.0 - 1e-7);
    assert!((omega(&sequential_repetition(&v, 1).unwrap()).unwrap() - w).abs() < 1e-6);
    assert!(omega(&sequential_repetition(&v, 2).unwrap()).unwrap() >= 1.0 - 1e-6);
    let pc = perfect_completeness_transform(&v, 2.0 / 3.0, 1.0 / 3.0).unwrap();
    assert!(matches!(sequential_repetition(&pc, 4), Err(Error::Size(_))));
}

#[test]
fn oversized_repetition_is_refused() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let v = random_unitary_verifier(2, 2, 1, &mut rng);
    assert!(matches!(parallel_repetition(&v, 4), Err(Error::Size(_))));
}
