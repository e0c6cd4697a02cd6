// SPDX-License-Identifier: MIT OR Apache-2.0
//! Random verifiers for tests and oracle studies.

use rand::Rng;

use super::action::{ActionKind, CircuitAction};
use super::gate::Gate;
use super::verifier::{ProverStrategy, Starter, VerifierSpec};
use crate::error::Result;
use crate::linalg::random::haar_unitary;
use crate::linalg::ComplexMatrix;

/// A Haar-random unitary on all of (M, W) as a circuit of raw gates.
///
/// Registers up to three qubits get one raw gate; wider ones get a layer
/// of random two-qubit gates on neighbouring pairs, twice.
pub fn random_unitary_action<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CircuitAction {
    let gates = if n <= 3 {
        vec![Gate::Raw { wires: (0..n).collect(), matrix: haar_unitary(1 << n, rng) }]
    } else {
        let mut g = Vec::new();
        for layer in 0..4 {
            let start = layer % 2;
            let mut w = start;
            while w + 1 < n {
                g.push(Gate::Raw { wires: vec![w, w + 1], matrix: haar_unitary(4, rng) });
                w += 2;
            }
        }
        g
    };
    CircuitAction { kind: ActionKind::Unitary, in_qubits: n, gates }
}

/// A random verifier with unitary actions and `rounds + 1` actions.
pub fn random_unitary_verifier<R: Rng + ?Sized>(q_m: usize, q_w: usize, rounds: usize, rng: &mut R) -> VerifierSpec {
    let n = q_m + q_w;
    let actions = (0..=rounds).map(|_| random_unitary_action(n, rng)).collect();
    let output_qubit = rng.gen_range(0..n);
    VerifierSpec::new(q_m, q_w, actions, output_qubit, Starter::Verifier).expect("random verifier is well formed")
}

/// A random almost-unitary verifier whose first `rounds` actions each end
/// by measuring up to `max_measure` random wires, in total at most
/// `total_measure`.
pub fn random_almost_unitary_verifier<R: Rng + ?Sized>(
    q_m: usize,
    q_w: usize,
    rounds: usize,
    total_measure: usize,
    rng: &mut R,
) -> VerifierSpec {
    let n = q_m + q_w;
    let mut budget = total_measure;
    let mut actions = Vec::new();
    for j in 0..=rounds {
        let mut a = random_unitary_action(n, rng);
        if j < rounds && budget > 0 {
            let k = if j + 1 == rounds { budget } else { rng.gen_range(0..=budget) };
            for _ in 0..k {
                a.gates.push(Gate::Measure(rng.gen_range(0..n)));
            }
            if k > 0 {
                a.kind = ActionKind::AlmostUnitary;
            }
            budget -= k;
        }
        actions.push(a);
    }
    let output_qubit = rng.gen_range(0..n);
    VerifierSpec::new(q_m, q_w, actions, output_qubit, Starter::Verifier).expect("random verifier is well formed")
}

/// Haar-random prover strategy.
pub fn random_prover<R: Rng + ?Sized>(v: &VerifierSpec, q_q: usize, rng: &mut R) -> ProverStrategy {
    let dim = 1usize << (q_q + v.q_m);
    ProverStrategy { q_q, actions: (0..v.num_prover_actions()).map(|_| haar_unitary(dim, rng)).collect() }
}

/// Prover strategy acting as the given unitaries on M (no Q register).
pub fn m_only_prover(us: Vec<ComplexMatrix>) -> Result<ProverStrategy> {
    ProverStrategy::from_m_unitaries(0, &us)
}
