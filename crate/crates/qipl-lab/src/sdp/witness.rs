// SPDX-License-Identifier: MIT OR Apache-2.0
//! Direct check of a claimed per-branch SDP solution, done on the full
//! registers without the facial reduction the builders use.

use serde::{Deserialize, Serialize};

use super::build::second_chain;
use crate::circuits::VerifierSpec;
use crate::linalg::{eigvals_hermitian, partial_trace_dims, ComplexMatrix};

/// Slack allowed on every constraint and on the objective threshold.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum WitnessReject {
    Setup { message: String },
    BlockCount { expected: usize, got: usize },
    BlockShape { block: usize, expected: usize, rows: usize, cols: usize },
    NotHermitian { block: usize, deviation: f64 },
    NotPsd { block: usize, min_eigenvalue: f64 },
    ConstraintResidual { block: usize, residual: f64 },
    TraceResidual { block: usize, residual: f64 },
    ObjectiveBelowThreshold { objective: f64, threshold: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WitnessVerdict {
    Accept { objective: f64 },
    Reject(WitnessReject),
}

impl WitnessVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, WitnessVerdict::Accept { .. })
    }
}

/// Accepts iff `blocks` (full-register states `X_1 … X_l` for branch `u`)
/// satisfy every constraint within [`WITNESS_TOL`] and reach objective at
/// least `c − WITNESS_TOL`.
pub fn check_np_witness(verifier: &VerifierSpec, u: &[bool], blocks: &[ComplexMatrix], c: f64) -> WitnessVerdict {
    let reject = WitnessVerdict::Reject;
    let ch = match second_chain(verifier, u) {
        Ok(ch) => ch,
        Err(e) => return reject(WitnessReject::Setup { message: e.to_string() }),
    };
    let l = ch.rounds();
    if blocks.len() != l {
        return reject(WitnessReject::BlockCount { expected: l, got: blocks.len() });
    }
    let d_m = ch.d_m();
    let dim = ch.rho0.rows();
    for (b, x) in blocks.iter().enumerate() {
        if x.shape() != (dim, dim) {
            return reject(WitnessReject::BlockShape { block: b + 1, expected: dim, rows: x.rows(), cols: x.cols() });
        }
        let dev = x.hermiticity_error();
        if dev > WITNESS_TOL {
            return reject(WitnessReject::NotHermitian { block: b + 1, deviation: dev });
        }
        let lmin = eigvals_hermitian(&x.hermitian_part()).ok().and_then(|v| v.last().copied()).unwrap_or(0.0);
        if lmin < -WITNESS_TOL {
            return reject(WitnessReject::NotPsd { block: b + 1, min_eigenvalue: lmin });
        }
    }
    let r_dim = dim / d_m;
    let mut prev = &ch.rho0;
    for (j, x) in blocks.iter().enumerate() {
        let image = ch.maps[j].conjugate(prev);
        let lhs = partial_trace_dims(x, &[d_m, r_dim], &[1]).expect("shape checked");
        let rhs = partial_trace_dims(&image, &[d_m, r_dim], &[1]).expect("shape checked");
        let residual = (&lhs - &rhs).frobenius_norm();
        if residual > WITNESS_TOL {
            return reject(WitnessReject::ConstraintResidual { block: j + 1, residual });
        }
        let tr_res = (x.trace().re - image.trace().re).abs();
        if tr_res > WITNESS_TOL {
            return reject(WitnessReject::TraceResidual { block: j + 1, residual: tr_res });
        }
        prev = x;
    }
    let objective = ch.objective.inner_re(&prev.hermitian_part());
    if objective < c - WITNESS_TOL {
        return reject(WitnessReject::ObjectiveBelowThreshold { objective, threshold: c });
    }
    WitnessVerdict::Accept { objective }
}
