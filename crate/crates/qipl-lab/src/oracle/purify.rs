// SPDX-License-Identifier: MIT OR Apache-2.0
//! Turning a first-program solution back into prover unitaries.

use crate::circuits::{forward_action, ProverStrategy, VerifierSpec};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, polar_unitary, ComplexMatrix, C64};
use crate::sdp::SdpSolution;

/// Largest constraint residual accepted as "feasible".
const FEASIBILITY_SLACK: f64 = 1e-5;

/// Prover strategy reproducing a first-program solution.
///
/// At every prover turn the actual global state and a purification of the
/// solution's block are purifications of the same state on the registers
/// the prover cannot touch; the prover's unitary is the polar factor that
/// best aligns the two (exact when the solution is exactly feasible).
/// The prover register has `q_M + q_W + (total environment)` qubits.
pub fn purify_strategy(verifier: &VerifierSpec, solution: &SdpSolution) -> Result<ProverStrategy> {
    verifier.check()?;
    let v = verifier.lift_to_isometric().to_verifier_start();
    let l = v.rounds();
    if solution.blocks.len() != l {
        return Err(Error::Argument(format!("solution has {} blocks, verifier has {l} rounds", solution.blocks.len())));
    }
    if solution.residual > FEASIBILITY_SLACK {
        return Err(Error::Argument(format!("solution residual {:.3e} is not feasible", solution.residual)));
    }
    let n = v.n_qubits();
    let env_total: usize = v.actions[..l].iter().map(|a| a.env_count()).sum();
    let q_q = n + env_total;
    let d_qm = 1usize << (q_q + v.q_m);
    let mut state = vec![C64::new(0.0, 0.0); 1 << (q_q + n)];
    state[0] = C64::new(1.0, 0.0);
    let mut live = 0;
    let mut actions = Vec::with_capacity(l);
    for j in 0..l {
        state = forward_action(&state, 1, q_q, live, &v.actions[j]);
        live += v.actions[j].env_count();
        let full = 1usize << (n + live);
        let rho = &solution.blocks[j];
        if rho.shape() != (full, full) {
            return Err(Error::Argument(format!("block {} is {}x{}, expected {full}x{full}", j + 1, rho.rows(), rho.cols())));
        }
        let tr = rho.trace().re;
        if tr <= 0.0 {
            return Err(Error::Argument(format!("block {} has non-positive trace", j + 1)));
        }
        let e = eig_hermitian(&rho.hermitian_part().scale_real(1.0 / tr))?;
        // target purification Σ √μ_i |i⟩_Q |v_i⟩_{M R}, laid out (Q, M, R)
        let d_r = full >> v.q_m;
        let mut target = vec![C64::new(0.0, 0.0); state.len()];
        for (i, &mu) in e.values.iter().enumerate() {
            if mu <= 0.0 {
                continue;
            }
            let s = mu.sqrt();
            for a in 0..full {
                target[(i << (n + live)) + a] = e.vectors[(a, i)] * s;
            }
        }
        let xs = ComplexMatrix::from_vec(d_qm, d_r, state.clone())?;
        let xt = ComplexMatrix::from_vec(d_qm, d_r, target)?;
        let u = polar_unitary(&xt.matmul(&xs.adjoint()));
        state = u.matmul(&xs).into_data();
        actions.push(u);
    }
    Ok(ProverStrategy { q_q, actions })
}
