// SPDX-License-Identifier: MIT OR Apache-2.0
//! Random verifiers on the yes or no side of a completeness/soundness gap.
//!
//! A random unitary verifier is rescaled with [`scale_acceptance`] until
//! its optimum sits where the caller needs it. The optimum is measured
//! with the SDP, and so is the least acceptance probability a prover can
//! force (through [`complement_output`]).

use rand::Rng;

use super::transforms::{complement_output, scale_acceptance};
use crate::circuits::random::random_unitary_verifier;
use crate::circuits::{Starter, VerifierSpec};
use crate::error::{Error, Result};
use crate::sdp::omega;

/// Random verifiers drawn before giving up on an instance.
pub const INSTANCE_TRIES: usize = 200;

#[derive(Clone, Debug)]
pub struct GapInstance {
    pub verifier: VerifierSpec,
    /// Optimal acceptance probability.
    pub omega: f64,
    /// Least acceptance probability over all provers.
    pub p_min: f64,
}

/// Shape of the random base verifier.
#[derive(Clone, Copy, Debug)]
pub struct InstanceShape {
    pub q_m: usize,
    pub q_w: usize,
    /// Number of verifier actions.
    pub actions: usize,
    pub starts_with: Starter,
}

impl Default for InstanceShape {
    fn default() -> Self {
        Self { q_m: 1, q_w: 1, actions: 2, starts_with: Starter::Verifier }
    }
}

/// Random unitary verifier of the given shape.
pub fn random_shaped_verifier<R: Rng + ?Sized>(shape: InstanceShape, rng: &mut R) -> VerifierSpec {
    let mut v = random_unitary_verifier(shape.q_m, shape.q_w, shape.actions.saturating_sub(1), rng);
    v.starts_with = shape.starts_with;
    v
}

fn measure(v: VerifierSpec) -> Result<GapInstance> {
    let value = omega(&v)?;
    let p_min: f64 = 1.0 - omega(&complement_output(&v)?)?;
    Ok(GapInstance { verifier: v, omega: value, p_min: p_min.max(0.0) })
}

/// Instance with `ω = target` (up to solver accuracy) whose least
/// acceptance probability is at most `p_min_cap`.
pub fn instance_with_value<R: Rng + ?Sized>(
    shape: InstanceShape,
    target: f64,
    p_min_cap: f64,
    rng: &mut R,
) -> Result<GapInstance> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::Parameter(format!("target value {target} outside [0, 1]")));
    }
    for _ in 0..INSTANCE_TRIES {
        let base = measure(random_shaped_verifier(shape, rng))?;
        if base.omega < target || base.omega <= 0.0 {
            continue;
        }
        let p = target / base.omega;
        if p * base.p_min > p_min_cap {
            continue;
        }
        return measure(scale_acceptance(&base.verifier, p)?);
    }
    Err(Error::Parameter(format!(
        "no random verifier reached value {target} with least acceptance ≤ {p_min_cap} in {INSTANCE_TRIES} draws"
    )))
}

/// Optimum at least `c`, least acceptance at most `alpha`.
pub fn yes_instance<R: Rng + ?Sized>(shape: InstanceShape, c: f64, alpha: f64, rng: &mut R) -> Result<GapInstance> {
    let target = (c + 0.25 * (1.0 - c) * rng.gen::<f64>()).min(1.0);
    instance_with_value(shape, target, alpha, rng)
}

/// Optimum at most `s`.
pub fn no_instance<R: Rng + ?Sized>(shape: InstanceShape, s: f64, rng: &mut R) -> Result<GapInstance> {
    let target = s * (0.5 + 0.5 * rng.gen::<f64>());
    instance_with_value(shape, target, 1.0, rng)
}
