// SPDX-License-Identifier: MIT OR Apache-2.0
//! Randomized check of trace-distance and fidelity inequalities on small
//! states: product bounds, data processing under random channels, unitary
//! invariance and the sum-of-squared-fidelities bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::random::{haar_unitary, random_density};
use crate::linalg::{fidelity_matrices, partial_trace_dims, tensor_all, trace_distance_matrices, ComplexMatrix};

/// Largest violation seen for one inequality. A value `≤ 0` means it held
/// on every sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub max_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.max_violation).fold(f64::NEG_INFINITY, f64::max)
    }
}

const NAMES: [&str; 6] = [
    "product_lower",
    "product_upper",
    "trace_data_processing",
    "unitary_invariance",
    "fidelity_data_processing",
    "sum_of_squared_fidelity",
];

/// Random channel on `q` qubits via a Stinespring isometry into
/// `out · env` dimensions, followed by tracing out the environment.
struct Channel {
    iso: ComplexMatrix,
    dims: [usize; 2],
}

impl Channel {
    fn random(q: usize, rng: &mut ChaCha8Rng) -> Self {
        let d = 1usize << q;
        let out = 1usize << rng.gen_range(1..=q);
        let env = 1usize << rng.gen_range(1..=2);
        let total = (out * env).max(d);
        let env = total / out;
        let u = haar_unitary(total, rng);
        let cols: Vec<usize> = (0..d).collect();
        Self { iso: u.select_columns(&cols), dims: [out, env] }
    }

    fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        partial_trace_dims(&self.iso.conjugate(rho), &self.dims, &[0])
    }
}

fn sample(rng: &mut ChaCha8Rng, worst: &mut [f64; 6]) -> Result<()> {
    let mut bump = |i: usize, v: f64| worst[i] = worst[i].max(v);

    let k = rng.gen_range(1..=3);
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for _ in 0..k {
        let q = rng.gen_range(1..=2usize.min(6 / k));
        left.push(random_density(q, rng.gen_range(1..=1 << q), rng).into_matrix());
        right.push(random_density(q, rng.gen_range(1..=1 << q), rng).into_matrix());
    }
    let each: Vec<f64> = left.iter().zip(&right).map(|(a, b)| trace_distance_matrices(a, b)).collect();
    let whole = trace_distance_matrices(&tensor_all(&left.iter().collect::<Vec<_>>())?, &tensor_all(&right.iter().collect::<Vec<_>>())?);
    bump(0, each.iter().copied().fold(0.0, f64::max) - whole);
    bump(1, whole - each.iter().sum::<f64>());

    let q = rng.gen_range(1..=2);
    let d = 1usize << q;
    let rho = random_density(q, rng.gen_range(1..=d), rng).into_matrix();
    let sigma = random_density(q, rng.gen_range(1..=d), rng).into_matrix();
    let t = trace_distance_matrices(&rho, &sigma);
    let ch = Channel::random(q, rng);
    bump(2, trace_distance_matrices(&ch.apply(&rho)?, &ch.apply(&sigma)?) - t);
    let u = haar_unitary(d, rng);
    bump(3, (trace_distance_matrices(&u.conjugate(&rho), &u.conjugate(&sigma)) - t).abs());

    // Full-rank states keep the matrix square roots well conditioned.
    let rho = random_density(q, d, rng).into_matrix();
    let sigma = random_density(q, d, rng).into_matrix();
    let xi = random_density(q, d, rng).into_matrix();
    let f = fidelity_matrices(&rho, &sigma);
    bump(4, f - fidelity_matrices(&ch.apply(&rho)?, &ch.apply(&sigma)?));
    bump(5, fidelity_matrices(&rho, &xi).powi(2) + fidelity_matrices(&xi, &sigma).powi(2) - 1.0 - f);
    Ok(())
}

/// Evaluates every inequality on `samples` random tuples.
pub fn run_distance_suite(samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [f64::NEG_INFINITY; 6];
    for _ in 0..samples {
        sample(&mut rng, &mut worst)?;
    }
    let checks = NAMES.iter().zip(worst).map(|(n, v)| CheckReport { name: (*n).into(), max_violation: v }).collect();
    Ok(SuiteReport { samples, seed, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_holds() {
        let r = run_distance_suite(200, 3).unwrap();
        assert_eq!(r.checks.len(), 6);
        assert!(r.max_violation() <= 1e-9, "{r:?}");
    }
}
