// SPDX-License-Identifier: MIT OR Apache-2.0
//! Verifier specifications, prover strategies and size caps.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::action::{ActionKind, CircuitAction};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, STRUCT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Starter {
    Verifier,
    Prover,
}

/// One step of a transform pipeline that produced a verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub transform: String,
    pub params: serde_json::Value,
    /// SHA-256 (hex) of the input verifier's JSON.
    pub input_hash: String,
}

/// A verifier: register sizes plus the actions `V_1, …, V_{l+1}`.
///
/// With `starts_with = Verifier` the message order is
/// `V_1 P_1 V_2 … P_l V_{l+1}` (2l turns); with `Prover` it is
/// `P_1 V_1 … P_{l+1} V_{l+1}` (2l+1 turns).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VerifierRepr")]
pub struct VerifierSpec {
    #[serde(rename = "q_M")]
    pub q_m: usize,
    #[serde(rename = "q_W")]
    pub q_w: usize,
    pub actions: Vec<CircuitAction>,
    /// Index into the concatenated (M, W) register.
    pub output_qubit: usize,
    pub starts_with: Starter,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<ProvenanceEntry>,
}

#[derive(Deserialize)]
struct VerifierRepr {
    #[serde(rename = "q_M")]
    q_m: usize,
    #[serde(rename = "q_W")]
    q_w: usize,
    actions: Vec<CircuitAction>,
    output_qubit: usize,
    starts_with: Starter,
    #[serde(default)]
    provenance: Vec<ProvenanceEntry>,
}

impl TryFrom<VerifierRepr> for VerifierSpec {
    type Error = Error;
    fn try_from(r: VerifierRepr) -> Result<Self> {
        let n = r.q_m + r.q_w;
        let actions = r
            .actions
            .into_iter()
            .map(|mut a| {
                if a.in_qubits == 0 {
                    a.in_qubits = n;
                }
                a
            })
            .collect();
        let v = VerifierSpec {
            q_m: r.q_m,
            q_w: r.q_w,
            actions,
            output_qubit: r.output_qubit,
            starts_with: r.starts_with,
            provenance: r.provenance,
        };
        v.check()?;
        Ok(v)
    }
}

impl VerifierSpec {
    pub fn new(q_m: usize, q_w: usize, actions: Vec<CircuitAction>, output_qubit: usize, starts_with: Starter) -> Result<Self> {
        let v = Self { q_m, q_w, actions, output_qubit, starts_with, provenance: vec![] };
        v.check()?;
        Ok(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.q_m + self.q_w
    }

    /// `l`, the number of actions before the final one.
    pub fn rounds(&self) -> usize {
        self.actions.len().saturating_sub(1)
    }

    pub fn num_turns(&self) -> usize {
        match self.starts_with {
            Starter::Verifier => 2 * self.rounds(),
            Starter::Prover => 2 * self.rounds() + 1,
        }
    }

    pub fn num_prover_actions(&self) -> usize {
        match self.starts_with {
            Starter::Verifier => self.rounds(),
            Starter::Prover => self.actions.len(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        self.actions.iter().all(|a| a.kind == ActionKind::Unitary)
    }

    pub fn has_almost_unitary(&self) -> bool {
        self.actions.iter().any(|a| a.kind == ActionKind::AlmostUnitary)
    }

    /// Number of dephased wires in each of `V_1 … V_l` (the final action's
    /// measurements never matter).
    pub fn measured_counts(&self) -> Vec<usize> {
        self.actions[..self.rounds()].iter().map(|a| a.measured_wires().len()).collect()
    }

    /// Structural validity, independent of caps.
    pub fn check(&self) -> Result<()> {
        let n = self.n_qubits();
        if n == 0 {
            return Err(Error::Validation("verifier needs at least one qubit".into()));
        }
        if self.actions.is_empty() {
            return Err(Error::Validation("verifier needs at least one action".into()));
        }
        if self.output_qubit >= n {
            return Err(Error::Validation(format!("output qubit {} outside (M, W) of width {n}", self.output_qubit)));
        }
        for (j, a) in self.actions.iter().enumerate() {
            if a.in_qubits != n {
                return Err(Error::Validation(format!(
                    "action {} acts on {} qubits, register has {n}",
                    j + 1,
                    a.in_qubits
                )));
            }
            a.check().map_err(|e| Error::Validation(format!("action {}: {e}", j + 1)))?;
        }
        Ok(())
    }

    /// Reinterprets every almost-unitary action as isometric, keeping the
    /// measurement records coherent (the deferred-measurement lift).
    pub fn lift_to_isometric(&self) -> Self {
        Self { actions: self.actions.iter().map(CircuitAction::lifted).collect(), ..self.clone() }
    }

    /// Prover-first verifiers get a leading identity action, which sends the
    /// all-zero message; verifier-first ones are returned unchanged.
    pub fn to_verifier_start(&self) -> Self {
        match self.starts_with {
            Starter::Verifier => self.clone(),
            Starter::Prover => {
                let mut actions = vec![CircuitAction::identity(self.n_qubits())];
                actions.extend(self.actions.iter().cloned());
                Self { actions, starts_with: Starter::Verifier, ..self.clone() }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verifier serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// SHA-256 (hex) of the JSON encoding.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// Prover unitaries on `(Q, M)`, Q most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProverStrategy {
    pub q_q: usize,
    pub actions: Vec<ComplexMatrix>,
}

impl ProverStrategy {
    pub fn identity(q_q: usize, q_m: usize, count: usize) -> Self {
        Self { q_q, actions: vec![ComplexMatrix::identity(1 << (q_q + q_m)); count] }
    }

    /// Lifts unitaries on M alone to `I_Q ⊗ U`.
    pub fn from_m_unitaries(q_q: usize, us: &[ComplexMatrix]) -> Result<Self> {
        let iq = ComplexMatrix::identity(1 << q_q);
        let actions = us.iter().map(|u| iq.kron(u)).collect::<Result<_>>()?;
        Ok(Self { q_q, actions })
    }

    pub fn check_against(&self, v: &VerifierSpec) -> Result<()> {
        let want = v.num_prover_actions();
        if self.actions.len() != want {
            return Err(Error::Compatibility(format!(
                "verifier expects {want} prover actions, strategy has {}",
                self.actions.len()
            )));
        }
        let dim = 1usize << (self.q_q + v.q_m);
        for (j, u) in self.actions.iter().enumerate() {
            if u.shape() != (dim, dim) {
                return Err(Error::Compatibility(format!(
                    "prover action {} is {}x{}, expected {dim}x{dim} on (Q, M)",
                    j + 1,
                    u.rows(),
                    u.cols()
                )));
            }
            if !u.is_unitary(STRUCT_TOL) {
                return Err(Error::Compatibility(format!(
                    "prover action {} is not unitary (deviation {:.3e})",
                    j + 1,
                    u.isometry_error()
                )));
            }
        }
        Ok(())
    }
}

/// Explicit size limits standing in for logarithmic space bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_register_qubits: usize,
    pub measure_cap: usize,
    pub max_turns: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_register_qubits: 12, measure_cap: 16, max_turns: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    RegisterTooLarge { qubits: usize, cap: usize },
    TooManyTurns { turns: usize, cap: usize },
    OutputOutOfRange { output_qubit: usize, width: usize },
    InQubitsMismatch { action: usize, in_qubits: usize, expected: usize },
    MeasureCapExceeded { action: usize, count: usize, cap: usize },
    InvalidAction { action: usize, reason: String },
    NoActions,
}

/// Reports every cap or shape violation; an empty list means the verifier
/// is acceptable.
pub fn validate_verifier(spec: &VerifierSpec, caps: &Caps) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = spec.n_qubits();
    if n > caps.max_register_qubits {
        out.push(Violation::RegisterTooLarge { qubits: n, cap: caps.max_register_qubits });
    }
    if spec.actions.is_empty() {
        out.push(Violation::NoActions);
    } else if spec.num_turns() > caps.max_turns {
        out.push(Violation::TooManyTurns { turns: spec.num_turns(), cap: caps.max_turns });
    }
    if spec.output_qubit >= n {
        out.push(Violation::OutputOutOfRange { output_qubit: spec.output_qubit, width: n });
    }
    for (j, a) in spec.actions.iter().enumerate() {
        let action = j + 1;
        if a.in_qubits != n {
            out.push(Violation::InQubitsMismatch { action, in_qubits: a.in_qubits, expected: n });
        }
        if a.kind == ActionKind::AlmostUnitary && a.measure_count() > caps.measure_cap {
            out.push(Violation::MeasureCapExceeded { action, count: a.measure_count(), cap: caps.measure_cap });
        }
        if let Err(e) = a.check() {
            out.push(Violation::InvalidAction { action, reason: e.to_string() });
        }
    }
    out
}
