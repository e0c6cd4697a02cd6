// SPDX-License-Identifier: MIT OR Apache-2.0
//! Multiset fingerprints `Π (x_i + r) mod p`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rejection-sampling budget when drawing the prime.
pub const PRIME_TRIALS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FingerprintParams {
    pub p: u64,
    pub r: u64,
    /// Bits per element.
    pub b: u32,
    /// Multiset size bound.
    pub ell: u64,
}

impl FingerprintParams {
    /// Checked constructor: `p` prime inside the interval for `(b, ell)`
    /// and `1 ≤ r < p`.
    pub fn new(p: u64, r: u64, b: u32, ell: u64) -> Result<Self> {
        let (lo, hi) = prime_interval(b, ell)?;
        if !(lo..=hi).contains(&p) || !is_prime(p) {
            return Err(Error::Argument(format!("p = {p} is not a prime in [{lo}, {hi}]")));
        }
        if r == 0 || r >= p {
            return Err(Error::Argument(format!("r = {r} is not in [1, {}]", p - 1)));
        }
        Ok(Self { p, r, b, ell })
    }
}

/// `[(b ell)², 2 (b ell)²]`.
pub fn prime_interval(b: u32, ell: u64) -> Result<(u64, u64)> {
    let be = (b as u64).checked_mul(ell).ok_or_else(|| Error::Argument("b·ell overflows".into()))?;
    if be < 2 {
        return Err(Error::Argument(format!("b·ell = {be} must be at least 2")));
    }
    let lo = be.checked_mul(be).filter(|&x| x <= u64::MAX / 2).ok_or_else(|| Error::Argument("b·ell too large".into()))?;
    Ok((lo, 2 * lo))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Draws `p` uniformly among the primes of the interval (by rejection)
/// and `r` uniformly in `[1, p − 1]`.
pub fn choose_fingerprint_params<R: Rng + ?Sized>(b: u32, ell: u64, rng: &mut R) -> Result<FingerprintParams> {
    let (lo, hi) = prime_interval(b, ell)?;
    for _ in 0..PRIME_TRIALS {
        let p = rng.gen_range(lo..=hi);
        if is_prime(p) {
            let r = rng.gen_range(1..p);
            return Ok(FingerprintParams { p, r, b, ell });
        }
    }
    Err(Error::Parameter(format!("no prime found in [{lo}, {hi}] after {PRIME_TRIALS} draws")))
}

/// `Π (x + r) mod p`; the empty multiset maps to 1.
pub fn fingerprint(multiset: &[u64], params: &FingerprintParams) -> Result<u64> {
    let mut acc = 1 % params.p;
    for &x in multiset {
        if params.b < 64 && x >> params.b != 0 {
            return Err(Error::Argument(format!("element {x} does not fit in {} bits", params.b)));
        }
        acc = fingerprint_step(acc, x, params);
    }
    Ok(acc)
}

/// One factor of the running product; the caller guarantees the range.
pub(crate) fn fingerprint_step(acc: u64, x: u64, params: &FingerprintParams) -> u64 {
    let factor = (x as u128 + params.r as u128) % params.p as u128;
    ((acc as u128 * factor) % params.p as u128) as u64
}

/// `(log₂ b + log₂ ell)/(b ell) + 1/(b² ell)`: the collision bound for
/// distinct multisets with its hidden constant set to 1.
pub fn collision_rate_bound(b: u32, ell: u64) -> f64 {
    let (b, ell) = (b as f64, ell as f64);
    (b.log2() + ell.log2()) / (b * ell) + 1.0 / (b * b * ell)
}
