// SPDX-License-Identifier: MIT OR Apache-2.0
//! Simulation and optimization toolkit for small space-bounded quantum
//! interactive proof systems.
//!
//! Verifiers are explicit circuit lists on a message register `M` and a
//! private register `W`. The crate computes optimal-prover acceptance
//! probabilities with block-structured semidefinite programs, cross-checks
//! them against independent heuristics, compiles verifiers through the
//! standard protocol transforms, and runs the classical fingerprinting and
//! game-tree protocols used alongside them.

pub mod circuits;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod protocols;
pub mod sdp;
pub mod statetest;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, C64};
