// SPDX-License-Identifier: MIT OR Apache-2.0
//! From a verifier and a list of simulated verifier views to a tuple of
//! state pairs on the private register, and a per-message comparison of a
//! simulator against a real interaction.

use serde::{Deserialize, Serialize};

use super::indivprod::IndivProdInstance;
use super::prep::{prepare_state, StatePrepCircuit};
use crate::circuits::{snapshots, ActionKind, CircuitAction, ProverStrategy, Starter, Step, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::trace_distance;

/// Completeness, soundness and per-message simulator error of the source
/// proof system. A missing `delta` uses [`default_delta`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessParams {
    pub c: f64,
    pub s: f64,
    pub delta: Option<f64>,
}

/// `(√c − √s)² / (2m²)` for an `m`-turn system.
pub fn default_delta(c: f64, s: f64, turns: usize) -> f64 {
    (c.sqrt() - s.sqrt()).powi(2) / (2.0 * (turns * turns) as f64)
}

/// `(√c − √s)² / (4(l − 1))`, the far-side threshold for `l` pairs.
pub fn hardness_alpha(c: f64, s: f64, l: usize) -> f64 {
    (c.sqrt() - s.sqrt()).powi(2) / (4.0 * (l as f64 - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessInstance {
    pub instance: IndivProdInstance,
    /// Number of prover messages, equal to the number of pairs.
    pub l: usize,
    /// Acceptance probability of the last simulated view after the final
    /// verifier action.
    pub final_acceptance: f64,
    /// `final_acceptance − c`.
    pub acceptance_gap: f64,
    /// Weight of `|0…0⟩` in the first simulated view.
    pub initial_zero_weight: f64,
}

fn check_inputs(v: &VerifierSpec, sims: &[StatePrepCircuit]) -> Result<usize> {
    v.check()?;
    if !v.is_unitary() {
        return Err(Error::Scope("the verifier must be unitary".into()));
    }
    if v.starts_with != Starter::Verifier {
        return Err(Error::Argument("the verifier must send the first message".into()));
    }
    let l = v.rounds();
    if sims.len() != l + 1 {
        return Err(Error::Argument(format!("{l} rounds need {} simulated views, got {}", l + 1, sims.len())));
    }
    let width = v.q_m + v.q_w;
    if let Some(j) = sims.iter().position(|s| s.num_outputs() != width) {
        return Err(Error::Compatibility(format!(
            "simulated view {j} has {} output qubits, the verifier register has {width}",
            sims[j].num_outputs()
        )));
    }
    Ok(l)
}

/// Runs `action` on the outputs of `sim`; the outputs stay the same.
fn compose(sim: &StatePrepCircuit, action: &CircuitAction) -> Result<StatePrepCircuit> {
    let outs = sim.output_qubits().to_vec();
    let n = sim.circuit().in_qubits;
    let mut gates = sim.circuit().gates.clone();
    gates.extend(action.remap(n, |w| outs[w]).gates);
    StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, n, gates)?, outs)
}

/// Pairs `(Tr_M ξ_j, Tr_M ξ'_j)` for `j = 1..=l`, where `ξ'_j` is the
/// `j`-th simulated view and `ξ_j` is the verifier's `j`-th action applied
/// to view `j − 1`.
pub fn build_hardness_instance(
    v: &VerifierSpec,
    sims: &[StatePrepCircuit],
    params: &HardnessParams,
) -> Result<HardnessInstance> {
    let l = check_inputs(v, sims)?;
    if l <= 1 {
        return Err(Error::Argument(format!("need at least two rounds, got {l}")));
    }
    let HardnessParams { c, s, delta } = *params;
    if !(0.0 <= s && s < c && c <= 1.0) {
        return Err(Error::Parameter(format!("need 0 <= s < c <= 1, got c = {c}, s = {s}")));
    }
    let delta = delta.unwrap_or_else(|| default_delta(c, s, v.num_turns()));
    let alpha = hardness_alpha(c, s, l);
    let mut pairs = Vec::with_capacity(l);
    for j in 1..=l {
        let w_outs = |p: &StatePrepCircuit| p.output_qubits()[v.q_m..].to_vec();
        let q = compose(&sims[j - 1], &v.actions[j - 1])?;
        let q = q.with_outputs(w_outs(&q))?;
        let qp = sims[j].with_outputs(w_outs(&sims[j]))?;
        pairs.push((q, qp));
    }
    let instance = IndivProdInstance::new(pairs, alpha, 2.0 * delta)?;

    let last = compose(&sims[l], &v.actions[l])?;
    let n = last.circuit().in_qubits;
    let out_wire = last.output_qubits()[v.output_qubit];
    let final_acceptance: f64 =
        last.full_state().iter().enumerate().filter(|(i, _)| i >> (n - 1 - out_wire) & 1 == 1).map(|(_, a)| a.norm_sqr()).sum();
    let initial_zero_weight = prepare_state(&sims[0])?.matrix()[(0, 0)].re;
    Ok(HardnessInstance { instance, l, final_acceptance, acceptance_gap: final_acceptance - c, initial_zero_weight })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageDistance {
    /// 1-based message number.
    pub message: usize,
    pub step: Step,
    pub distance: f64,
}

/// Trace distance between each simulated view and the verifier's real
/// view on `(M, W)` when interacting with `prover`. Odd messages compare
/// the verifier's action on the previous simulated view, even messages
/// compare the simulated view itself.
pub fn check_simulator_consistency(
    v: &VerifierSpec,
    sims: &[StatePrepCircuit],
    prover: &ProverStrategy,
) -> Result<Vec<MessageDistance>> {
    let l = check_inputs(v, sims)?;
    let snaps = snapshots(v, prover)?;
    let mut out = Vec::with_capacity(2 * l + 1);
    for snap in snaps {
        let (message, sim) = match snap.step {
            Step::Verifier(j) => (2 * j - 1, compose(&sims[j - 1], &v.actions[j - 1])?),
            Step::Prover(j) => (2 * j, sims[j].clone()),
        };
        let distance = trace_distance(&prepare_state(&sim)?, &snap.state)?;
        out.push(MessageDistance { message, step: snap.step, distance });
    }
    Ok(out)
}
