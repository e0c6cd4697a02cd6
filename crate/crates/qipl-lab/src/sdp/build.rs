// SPDX-License-Identifier: MIT OR Apache-2.0
//! The two SDP formulations of a verifier's maximum acceptance
//! probability.
//!
//! Both are chains: block `j` holds the state right after the prover's
//! `j`-th reply, on `M ⊗ R_j`, and the only link between consecutive
//! blocks is that the prover cannot touch `R_j`:
//!
//! ```text
//! Tr_M X_j = Tr_M(A_j X_{j-1} A_j†),   Tr X_j = Tr(A_j X_{j-1} A_j†),   X_0 = |0⟩⟨0|
//! ```
//!
//! For the first formulation `A_j` is the verifier's isometry with all
//! earlier environment registers carried along (`R_j = W E_1 … E_j`); for
//! the second it is the isometry projected onto one measurement outcome
//! (`R_j = W`, blocks unnormalized).
//!
//! Each block is restricted to `M ⊗ S_j`, where `S_j` is the support that
//! the right-hand side can ever reach. Without that reduction the programs
//! have no strictly feasible point whenever `W` starts out pure.

use super::program::{hermitian_basis, identity_kron, BlockInfo, Constraint, Entry, ObjectiveTerm, SdpProgram, Term};
use crate::circuits::{forward_action, ActionKind, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_dims, support_basis, ComplexMatrix, C64};

/// Largest full register (in qubits) a block may live on.
pub const MAX_BLOCK_QUBITS: usize = 12;

/// Eigenvalues below this fraction of the largest are outside a support.
const SUPPORT_TOL: f64 = 1e-10;

pub(crate) struct Chain {
    pub q_m: usize,
    /// Qubit split of `R_j` for `j = 0..=l`.
    pub r_qubits: Vec<Vec<usize>>,
    /// `A_1, …, A_l`.
    pub maps: Vec<ComplexMatrix>,
    /// Acceptance operator on `M ⊗ R_l`.
    pub objective: ComplexMatrix,
    pub rho0: ComplexMatrix,
}

impl Chain {
    pub fn d_m(&self) -> usize {
        1 << self.q_m
    }

    pub fn rounds(&self) -> usize {
        self.maps.len()
    }

    pub fn r_dim(&self, j: usize) -> usize {
        1 << self.r_qubits[j].iter().sum::<usize>()
    }

    pub fn full_qubit_dims(&self, j: usize) -> Vec<usize> {
        std::iter::once(self.q_m).chain(self.r_qubits[j].iter().copied()).filter(|&q| q > 0).collect()
    }
}

/// Columns `forward_action(I)`: the action as a matrix on `(M, W, live)`.
fn action_matrix(v: &VerifierSpec, j: usize, live: usize) -> Result<ComplexMatrix> {
    let a = &v.actions[j];
    let n = v.n_qubits();
    if n + live + a.env_count() > MAX_BLOCK_QUBITS {
        return Err(Error::Size(format!(
            "action {} needs a {}-qubit register, cap is {MAX_BLOCK_QUBITS}",
            j + 1,
            n + live + a.env_count()
        )));
    }
    let dim = 1usize << (n + live);
    let id = ComplexMatrix::identity(dim);
    let data = forward_action(id.data(), dim, 0, live, a);
    ComplexMatrix::from_vec(data.len() / dim, dim, data)
}

/// `A† Π A` with `Π` projecting qubit `wire` of `A`'s output onto `|1⟩`.
fn accept_operator(a: &ComplexMatrix, wire: usize) -> ComplexMatrix {
    let nq = a.rows().trailing_zeros() as usize;
    let shift = nq - 1 - wire;
    let mut pa = a.clone();
    for r in 0..a.rows() {
        if r >> shift & 1 == 0 {
            for col in 0..a.cols() {
                pa[(r, col)] = C64::new(0.0, 0.0);
            }
        }
    }
    pa.adjoint().matmul(&pa)
}

fn initial_state(n: usize) -> ComplexMatrix {
    ComplexMatrix::basis_projector(1 << n, 0)
}

pub(crate) fn first_chain(v: &VerifierSpec) -> Result<Chain> {
    v.check()?;
    if let Some(j) = v.actions.iter().position(|a| a.kind == ActionKind::AlmostUnitary) {
        return Err(Error::Scope(format!(
            "action {} is almost-unitary; use the per-branch formulation or lift the verifier to isometric form first",
            j + 1
        )));
    }
    let v = v.to_verifier_start();
    let l = v.rounds();
    let mut maps = Vec::with_capacity(l);
    let mut r_qubits = vec![vec![v.q_w]];
    let mut live = 0;
    for j in 0..l {
        maps.push(action_matrix(&v, j, live)?);
        live += v.actions[j].env_count();
        let mut rq = r_qubits[j].clone();
        rq.push(v.actions[j].env_count());
        r_qubits.push(rq);
    }
    let last = action_matrix(&v, l, live)?;
    Ok(Chain {
        q_m: v.q_m,
        r_qubits,
        maps,
        objective: accept_operator(&last, v.output_qubit),
        rho0: initial_state(v.n_qubits()),
    })
}

pub(crate) fn second_chain(v: &VerifierSpec, u: &[bool]) -> Result<Chain> {
    v.check()?;
    let v = v.to_verifier_start();
    let l = v.rounds();
    let counts = v.measured_counts();
    let total: usize = counts.iter().sum();
    if u.len() != total {
        return Err(Error::Argument(format!(
            "outcome string has {} bits, the verifier measures {total} wires before its final action",
            u.len()
        )));
    }
    let n = v.n_qubits();
    let mut maps = Vec::with_capacity(l);
    let mut offset = 0;
    for j in 0..l {
        let a = &v.actions[j];
        if a.kind == ActionKind::Isometric && a.env_count() > 0 {
            return Err(Error::Scope(format!(
                "action {} keeps live environment wires; the per-branch formulation needs measured ones",
                j + 1
            )));
        }
        let iso = action_matrix(&v, j, 0)?;
        let e = a.env_count();
        let bits = &u[offset..offset + counts[j]];
        offset += counts[j];
        let outcome = bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        let dim = 1usize << n;
        maps.push(ComplexMatrix::from_fn(dim, dim, |r, col| iso[((r << e) | outcome, col)]));
    }
    let last = action_matrix(&v, l, 0)?;
    Ok(Chain {
        q_m: v.q_m,
        r_qubits: vec![vec![v.q_w]; l + 1],
        maps,
        objective: accept_operator(&last, v.output_qubit),
        rho0: initial_state(n),
    })
}

fn negate(entries: Vec<Entry>) -> Vec<Entry> {
    entries.into_iter().map(|Entry(r, c, z)| Entry(r, c, -z)).collect()
}

fn chain_program(ch: &Chain, name: &dyn Fn(usize) -> String) -> SdpProgram {
    let d_m = ch.d_m();
    let l = ch.rounds();
    let mut blocks = Vec::with_capacity(l);
    let mut frames = Vec::new();
    let mut constraints = Vec::new();
    let mut prev: Option<ComplexMatrix> = None;
    for j in 1..=l {
        let a = &ch.maps[j - 1];
        let r_dim = ch.r_dim(j);
        let reach = match &prev {
            None => a.conjugate(&ch.rho0),
            Some(p) => {
                let ap = a.matmul(p);
                ap.matmul(&ap.adjoint())
            }
        };
        let tau = partial_trace_dims(&reach, &[d_m, r_dim], &[1]).expect("chain dimensions agree");
        let basis = support_basis(&tau, SUPPORT_TOL);
        let k = basis.cols();
        let embed = ComplexMatrix::identity(d_m).kron(&basis).expect("block below dimension cap");
        let frame = prev.as_ref().map(|p| {
            frames.push(a.matmul(p).adjoint().matmul(&embed));
            frames.len() - 1
        });
        let tau1 = prev.is_none().then(|| basis.adjoint().matmul(&tau).matmul(&basis));
        let b = j - 1;
        let mut push = |entries_h: &[Entry], rhs: f64, label: String| {
            let own = identity_kron(d_m, k, entries_h);
            let mut terms = Vec::new();
            if !own.is_empty() {
                terms.push(Term { block: b, frame: None, entries: own.clone() });
            }
            if let Some(f) = frame {
                if !own.is_empty() && b > 0 {
                    terms.push(Term { block: b - 1, frame: Some(f), entries: negate(own) });
                }
            }
            constraints.push(Constraint { terms, rhs, label });
        };
        for h in hermitian_basis(k) {
            let rhs = tau1.as_ref().map_or(0.0, |t| h.iter().map(|&Entry(r, c, z)| (z * t[(c, r)]).re).sum());
            push(&h, rhs, format!("partial-trace {j}"));
        }
        let trace_h: Vec<Entry> = (0..k).map(|i| Entry(i, i, C64::new(1.0, 0.0))).collect();
        let trace_rhs = tau1.as_ref().map_or(0.0, |t| t.trace().re);
        push(&trace_h, trace_rhs, format!("trace {j}"));
        blocks.push(BlockInfo {
            name: name(j),
            dim: d_m * k,
            embedding: Some(embed.clone()),
            qubit_dims: ch.full_qubit_dims(j),
        });
        prev = Some(embed);
    }
    let (objective, objective_constant) = match &prev {
        None => (vec![], ch.objective.inner_re(&ch.rho0)),
        Some(p) => {
            let o = p.adjoint().matmul(&ch.objective).matmul(p).hermitian_part();
            (vec![ObjectiveTerm { block: l - 1, matrix: o }], 0.0)
        }
    };
    SdpProgram { blocks, frames, objective, objective_constant, constraints }
}

/// Program whose optimum is the maximum acceptance probability of a
/// unitary or isometric verifier. Prover-first verifiers get a leading
/// identity turn.
pub fn build_first_sdp(verifier: &VerifierSpec) -> Result<SdpProgram> {
    let ch = first_chain(verifier)?;
    Ok(chain_program(&ch, &|j| format!("rho_{j}")))
}

/// Program for one measurement branch `u` (the outcomes of every
/// dephased wire of `V_1 … V_l`, in order).
pub fn build_second_sdp(verifier: &VerifierSpec, u: &[bool]) -> Result<SdpProgram> {
    let ch = second_chain(verifier, u)?;
    let key: String = u.iter().map(|&b| if b { '1' } else { '0' }).collect();
    Ok(chain_program(&ch, &|j| format!("rho_{j}|{key}")))
}
