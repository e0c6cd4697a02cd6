// SPDX-License-Identifier: MIT OR Apache-2.0
//! Semidefinite programs for optimal acceptance probabilities, their
//! solver, and the witness check.

mod build;
mod program;
mod solver;
mod witness;

pub use build::{build_first_sdp, build_second_sdp, MAX_BLOCK_QUBITS};
pub use program::{BlockInfo, Constraint, Entry, ObjectiveTerm, SdpProgram, Term};
pub use solver::{solve, solve_with, SdpSolution, SolverConfig};
pub use witness::{check_np_witness, WitnessReject, WitnessVerdict, WITNESS_TOL};

use crate::circuits::VerifierSpec;
use crate::error::Result;

pub const DEFAULT_TOL: f64 = 1e-7;

/// Maximum acceptance probability of a unitary or isometric verifier.
pub fn omega(verifier: &VerifierSpec) -> Result<f64> {
    Ok(omega_solution(verifier, DEFAULT_TOL)?.objective_value)
}

/// Solved first program, with dual bound and blocks.
pub fn omega_solution(verifier: &VerifierSpec, tol: f64) -> Result<SdpSolution> {
    solve(&build_first_sdp(verifier)?, tol)
}

/// Solved per-branch program for outcome string `u`.
pub fn omega_hat(verifier: &VerifierSpec, u: &[bool], tol: f64) -> Result<SdpSolution> {
    solve(&build_second_sdp(verifier, u)?, tol)
}
