// SPDX-License-Identifier: MIT OR Apache-2.0
use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("compatibility error: {0}")]
    Compatibility(String),
    #[error("scope error: {0}")]
    Scope(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("program is infeasible: {0}")]
    Infeasible(String),
    #[error("solver did not converge after {iterations} iterations (primal residual {primal_residual:.3e}, gap {gap:.3e})")]
    Convergence {
        iterations: usize,
        primal_residual: f64,
        gap: f64,
        /// The last iterate, mapped back to the complex program.
        best: Box<crate::sdp::SdpSolution>,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
