// SPDX-License-Identifier: MIT OR Apache-2.0
//! Independent estimates of a verifier's value: explicit prover
//! optimization, strategy recovery from an SDP solution, and brute force
//! over classical provers.

mod classical;
mod purify;
mod seesaw;

pub use classical::{
    enumerate_classical, enumerate_with_coins, ClassicalProtocol, CoinMode, EnumerationConfig, EnumerationResult, Move,
    StrategyEntry, Token,
};
pub use purify::purify_strategy;
pub use seesaw::{see_saw_prover, thread_count, SeeSawConfig, SeeSawOutcome};
