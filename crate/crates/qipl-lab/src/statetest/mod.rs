// SPDX-License-Identifier: MIT OR Apache-2.0
//! State preparation circuits, tuples of state pairs with exact
//! distinguishability decisions, the reduction from a simulated verifier
//! view to such a tuple, and a randomized check of distance inequalities.

mod hardness;
mod indivprod;
mod inequalities;
mod prep;

pub use hardness::{
    build_hardness_instance, check_simulator_consistency, default_delta, hardness_alpha, HardnessInstance,
    HardnessParams, MessageDistance,
};
pub use indivprod::{
    decide_indivprod, product_distance_bounds, IndivProdInstance, IndivProdReport, IndivProdVerdict,
    ProductBounds, DEFAULT_PROMISE_FLOOR, MAX_EXACT_QUBITS,
};
pub use inequalities::{run_distance_suite, CheckReport, SuiteReport};
pub use prep::{prepare_state, StatePrepCircuit};
