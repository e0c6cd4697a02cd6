// SPDX-License-Identifier: MIT OR Apache-2.0
//! Pure-state simulation of a verifier interacting with a prover.
//!
//! The global state is a list of branches, one per outcome string of the
//! dephased environment wires seen so far. Each branch holds an
//! unnormalized vector on `(Q, M, W, live env)` with Q most significant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::action::{forward_action, ActionKind};
use super::verifier::{ProverStrategy, Starter, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix, C64};

/// Refuse simulations whose branch vectors exceed this many amplitudes.
pub const MAX_STATE_QUBITS: usize = 24;

/// Branches with squared norm below this are dropped.
const BRANCH_FLOOR: f64 = 1e-30;

#[derive(Clone, Debug)]
struct Branch {
    outcome: Vec<bool>,
    state: Vec<C64>,
}

#[derive(Clone, Debug)]
struct Sim {
    q_q: usize,
    q_m: usize,
    n: usize,
    live: usize,
    branches: Vec<Branch>,
}

/// Which party just acted, with its 1-based action index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "party", content = "index", rename_all = "lowercase")]
pub enum Step {
    Verifier(usize),
    Prover(usize),
}

impl Sim {
    fn new(q_q: usize, v: &VerifierSpec) -> Self {
        let n = v.n_qubits();
        let mut state = vec![c(0.0, 0.0); 1 << (q_q + n)];
        state[0] = c(1.0, 0.0);
        Self { q_q, q_m: v.q_m, n, live: 0, branches: vec![Branch { outcome: vec![], state }] }
    }

    fn nq(&self) -> usize {
        self.q_q + self.n + self.live
    }

    fn verifier(&mut self, v: &VerifierSpec, j: usize, dephase: bool) -> Result<()> {
        let a = &v.actions[j];
        let e = a.env_count();
        if self.nq() + e > MAX_STATE_QUBITS {
            return Err(Error::Size(format!("simulation needs {} qubits, cap is {MAX_STATE_QUBITS}", self.nq() + e)));
        }
        let measured = dephase && a.kind == ActionKind::AlmostUnitary && e > 0;
        let mut next = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            let grown = forward_action(&b.state, 1, self.q_q, self.live, a);
            if !measured {
                next.push(Branch { outcome: b.outcome.clone(), state: grown });
                continue;
            }
            // Every new wire of an almost-unitary action is a measurement
            // record, and they sit in the trailing e positions.
            let sub = 1usize << e;
            let rest = grown.len() / sub;
            for o in 0..sub {
                let piece: Vec<C64> = (0..rest).map(|r| grown[r * sub + o]).collect();
                if piece.iter().map(|z| z.norm_sqr()).sum::<f64>() < BRANCH_FLOOR {
                    continue;
                }
                let mut outcome = b.outcome.clone();
                outcome.extend((0..e).map(|k| o >> (e - 1 - k) & 1 == 1));
                next.push(Branch { outcome, state: piece });
            }
        }
        self.branches = next;
        if !measured {
            self.live += e;
        }
        Ok(())
    }

    fn prover(&mut self, u: &ComplexMatrix) {
        let rest = 1usize << (self.nq() - self.q_q - self.q_m);
        for b in &mut self.branches {
            let psi = ComplexMatrix::from_vec(u.cols(), rest, std::mem::take(&mut b.state))
                .expect("branch layout matches prover dimension");
            b.state = u.matmul(&psi).into_data();
        }
    }

    /// Squared norm of the `output = 1` component of each branch.
    fn accept_weights(&self, output: usize) -> Vec<f64> {
        let shift = self.nq() - 1 - (self.q_q + output);
        self.branches
            .iter()
            .map(|b| {
                b.state.iter().enumerate().filter(|(i, _)| i >> shift & 1 == 1).map(|(_, z)| z.norm_sqr()).sum()
            })
            .collect()
    }

    /// Reduced state on (M, W), summed over branches.
    fn mw_state(&self) -> ComplexMatrix {
        let dq = 1usize << self.q_q;
        let dmw = 1usize << self.n;
        let de = 1usize << self.live;
        let mut rho = ComplexMatrix::zeros(dmw, dmw);
        for b in &self.branches {
            for q in 0..dq {
                for a in 0..dmw {
                    let ra = &b.state[(q * dmw + a) * de..(q * dmw + a + 1) * de];
                    for a2 in 0..dmw {
                        let rb = &b.state[(q * dmw + a2) * de..(q * dmw + a2 + 1) * de];
                        let s: C64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
                        rho[(a, a2)] += s;
                    }
                }
            }
        }
        rho
    }
}

/// Runs the whole interaction, calling `observe` after every step.
fn drive(v: &VerifierSpec, p: &ProverStrategy, mut observe: impl FnMut(Step, &Sim)) -> Result<Sim> {
    v.check()?;
    p.check_against(v)?;
    let mut sim = Sim::new(p.q_q, v);
    let last = v.actions.len() - 1;
    let mut pj = 0usize;
    let mut prover_turn = |sim: &mut Sim, observe: &mut dyn FnMut(Step, &Sim)| {
        sim.prover(&p.actions[pj]);
        pj += 1;
        observe(Step::Prover(pj), sim);
    };
    for j in 0..=last {
        if v.starts_with == Starter::Prover {
            prover_turn(&mut sim, &mut observe);
        }
        sim.verifier(v, j, j < last)?;
        observe(Step::Verifier(j + 1), &sim);
        if v.starts_with == Starter::Verifier && j < last {
            prover_turn(&mut sim, &mut observe);
        }
    }
    Ok(sim)
}

/// Probability that the output qubit reads 1 at the end of the interaction.
pub fn run_protocol(verifier: &VerifierSpec, prover: &ProverStrategy) -> Result<f64> {
    let sim = drive(verifier, prover, |_, _| {})?;
    Ok(sim.accept_weights(verifier.output_qubit).iter().sum::<f64>().clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchStats {
    pub probability: f64,
    /// Acceptance probability conditioned on the branch (0 for empty ones).
    pub acceptance: f64,
}

impl BranchStats {
    /// The branch's contribution `probability · acceptance`.
    pub fn weight(&self) -> f64 {
        self.probability * self.acceptance
    }
}

pub fn outcome_key(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_outcome(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("outcome strings use 0/1, got {other:?}"))),
        })
        .collect()
}

/// Decomposition of the acceptance probability over measurement outcomes
/// of `V_1 … V_l`, keyed by the outcome bit string.
pub fn branch_probabilities(
    verifier: &VerifierSpec,
    prover: &ProverStrategy,
) -> Result<BTreeMap<String, BranchStats>> {
    let sim = drive(verifier, prover, |_, _| {})?;
    let acc = sim.accept_weights(verifier.output_qubit);
    let mut out = BTreeMap::new();
    for (b, a) in sim.branches.iter().zip(acc) {
        let p: f64 = b.state.iter().map(|z| z.norm_sqr()).sum();
        let cond = if p > 0.0 { (a / p).clamp(0.0, 1.0) } else { 0.0 };
        out.insert(outcome_key(&b.outcome), BranchStats { probability: p, acceptance: cond });
    }
    Ok(out)
}

/// Reduced (M, W) state after a step of the interaction.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: Step,
    pub state: DensityMatrix,
}

/// The verifier's view after every message: reduced states on (M, W),
/// mixed over measurement branches.
pub fn snapshots(verifier: &VerifierSpec, prover: &ProverStrategy) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    let dims = vec![verifier.q_m, verifier.q_w];
    let mut err = None;
    drive(verifier, prover, |step, sim| {
        match DensityMatrix::from_clipped(&sim.mw_state(), dims.clone(), true) {
            Ok(state) => out.push(Snapshot { step, state }),
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Pinching of one qubit: zeroes the coherences between its 0 and 1
/// subspaces. `wire` is a position in an `nq`-qubit register.
pub fn dephase(rho: &ComplexMatrix, nq: usize, wire: usize) -> ComplexMatrix {
    let shift = nq - 1 - wire;
    ComplexMatrix::from_fn(rho.rows(), rho.cols(), |r, col| {
        if (r >> shift & 1) == (col >> shift & 1) {
            rho[(r, col)]
        } else {
            c(0.0, 0.0)
        }
    })
}
