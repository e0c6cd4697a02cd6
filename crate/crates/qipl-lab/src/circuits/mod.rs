// SPDX-License-Identifier: MIT OR Apache-2.0
//! Verifier and prover circuits, deferred-measurement isometries and the
//! simulation of an interaction.
//!
//! Wire numbering inside an action: `0..in_qubits` is the (M, W) register
//! (M first), and every `Measure` or `Ancilla` gate creates the next wire
//! in order. A `Measure(w)` copies `w` onto its fresh wire with a CNOT;
//! in almost-unitary actions those fresh wires are dephased at the end of
//! the turn and never touched again.

mod action;
mod gate;
pub mod random;
mod simulate;
mod verifier;

pub use action::{ActionKind, CircuitAction};
pub(crate) use action::{adjoint_action, forward_action};
pub use gate::{hadamard, pauli_x, swap_matrix, t_matrix, Gate, MAX_RAW_WIRES};
pub use simulate::{
    branch_probabilities, dephase, outcome_key, parse_outcome, run_protocol, snapshots, BranchStats, Snapshot, Step,
    MAX_STATE_QUBITS,
};
pub use verifier::{validate_verifier, Caps, ProverStrategy, ProvenanceEntry, Starter, VerifierSpec, Violation};
