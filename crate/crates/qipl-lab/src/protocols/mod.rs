// SPDX-License-Identifier: MIT OR Apache-2.0
//! Concrete protocols (3-SAT with fingerprints, the SAC¹ game) and the
//! verifier transforms.

pub mod fingerprint;
pub mod instances;
pub mod sac1;
pub mod sat;
pub mod transforms;

pub use fingerprint::{choose_fingerprint_params, collision_rate_bound, fingerprint, FingerprintParams};
pub use instances::{instance_with_value, no_instance, yes_instance, GapInstance, InstanceShape};
pub use sac1::{build_sac1_protocol, random_sac1_circuit, sac1_game_value, Sac1Circuit, Sac1Gate, Sac1Kind, Sac1Protocol};
pub use sat::{
    build_3sat_protocol, honest_3sat_prover, Cnf3Formula, SatReject, SatTranscript, SatVerdict, ThreeSatProtocol, Triple,
    TripleEncoding,
};
pub use transforms::{
    complement_output, dyadic_threshold, parallel_repetition, perfect_completeness_transform, repetition_count, scale_acceptance,
    sequential_repetition, single_coin_qmaml, turn_halving,
};
