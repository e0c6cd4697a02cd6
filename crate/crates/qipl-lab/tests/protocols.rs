// SPDX-License-Identifier: MIT OR Apache-2.0
use num_rational::Rational64;
use proptest::prelude::*;
use qipl_lab::oracle::{enumerate_classical, enumerate_with_coins, ClassicalProtocol, EnumerationConfig};
use qipl_lab::protocols::{
    build_sac1_protocol, choose_fingerprint_params, collision_rate_bound, fingerprint, honest_3sat_prover,
    random_sac1_circuit, sac1_game_value, Cnf3Formula, ThreeSatProtocol,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn example_formula() -> Cnf3Formula {
    Cnf3Formula::new(4, vec![[1, 2, 3], [-4, -2, 3], [4, -1, -3]]).unwrap()
}

#[test]
fn honest_prover_accepted_for_every_sampled_parameter() {
    let f = example_formula();
    let proto = ThreeSatProtocol::new(f.clone()).unwrap();
    assert_eq!((proto.encoding.b, proto.encoding.ell), (7, 9));
    let tr = honest_3sat_prover(&f, &[true; 4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let params = proto.sample_coin(&mut rng);
        let verdict = proto.verify_transcript(&params, &tr);
        assert!(verdict.accept, "{verdict:?}");
    }
}

fn unsat_toys() -> Vec<Cnf3Formula> {
    vec![
        Cnf3Formula::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap(),
        Cnf3Formula::new(2, vec![[1, 1, 2], [-1, -1, 2], [-2, -2, -2]]).unwrap(),
        Cnf3Formula::new(2, vec![[1, 2, 2], [1, -2, -2], [-1, 2, 2], [-1, -2, -2]]).unwrap(),
        Cnf3Formula::new(3, vec![[1, 1, 1], [-1, 2, 2], [-2, 3, 3], [-3, -3, -3]]).unwrap(),
    ]
}

#[test]
fn unsatisfiable_value_equals_best_collision_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for f in unsat_toys() {
        assert!(f.satisfying_assignment().is_none());
        let proto = ThreeSatProtocol::new(f).unwrap();
        // 512 equally weighted draws keep every partial sum exact
        let coins: Vec<_> = (0..512).map(|_| (proto.sample_coin(&mut rng), 1.0 / 512.0)).collect();
        let (value, _, _) = enumerate_with_coins(&proto, &coins, 10_000_000).unwrap();
        let collisions = proto.collision_acceptance(&coins).unwrap();
        assert_eq!(value, collisions);
        assert!(value < 0.5, "{value}");
    }
}

#[test]
fn fixed_parameters_give_zero_or_one() {
    let f = &unsat_toys()[0];
    let proto = ThreeSatProtocol::new(f.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let params = proto.sample_coin(&mut rng);
        let fixed = proto.clone().with_fixed_params(params).unwrap();
        let r = enumerate_classical(&fixed, &EnumerationConfig::default()).unwrap();
        let collide = proto.collision_acceptance(&[(params, 1.0)]).unwrap();
        assert_eq!(r.value, collide);
        assert!(r.value == 0.0 || r.value == 1.0);
    }
}

#[test]
fn collision_rate_within_ten_times_bound() {
    let (b, ell) = (7u32, 9u64);
    let a: Vec<u64> = (0..9).collect();
    let mut c = a.clone();
    c[8] = 9;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let draws = 10_000;
    let mut hits = 0;
    for _ in 0..draws {
        let p = choose_fingerprint_params(b, ell, &mut rng).unwrap();
        hits += (fingerprint(&a, &p).unwrap() == fingerprint(&c, &p).unwrap()) as usize;
    }
    let rate = hits as f64 / draws as f64;
    assert!(rate <= 10.0 * collision_rate_bound(b, ell), "{rate}");
}

#[test]
fn and_chain_value() {
    use qipl_lab::protocols::{Sac1Circuit, Sac1Gate, Sac1Kind};
    // AND(AND(x1, x2), x1) on input 01: best prover wins only when both
    // coins avoid x1
    let g = |id, kind, children: Vec<usize>, literal| Sac1Gate { id, kind, children, literal };
    let c = Sac1Circuit::new(
        2,
        vec![
            g(0, Sac1Kind::Input, vec![], Some(1)),
            g(1, Sac1Kind::Input, vec![], Some(2)),
            g(2, Sac1Kind::And, vec![0, 1], None),
            g(3, Sac1Kind::And, vec![2, 0], None),
        ],
        3,
    )
    .unwrap();
    assert_eq!(sac1_game_value(&c, &[false, true]).unwrap(), Rational64::new(1, 4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sac1_value_matches_enumeration(seed in any::<u64>(), gates in 1usize..=12, inputs in 1usize..=4, x in any::<u8>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = random_sac1_circuit(inputs, gates, &mut rng).unwrap();
        let input: Vec<bool> = (0..inputs).map(|i| x >> i & 1 == 1).collect();
        let exact = sac1_game_value(&circuit, &input).unwrap();
        let proto = build_sac1_protocol(&circuit, &input).unwrap();
        let r = enumerate_classical(&proto, &EnumerationConfig::default()).unwrap();
        let denom = 1i64 << circuit.and_depth();
        prop_assert_eq!(Rational64::new((r.value * denom as f64).round() as i64, denom), exact);
        prop_assert_eq!(r.value, *exact.numer() as f64 / *exact.denom() as f64);
        if circuit.evaluate(&input).unwrap() {
            prop_assert_eq!(exact, Rational64::from_integer(1));
        } else {
            prop_assert!(exact <= Rational64::from_integer(1) - Rational64::new(1, 1i64 << circuit.depth()));
        }
    }
}
