// SPDX-License-Identifier: MIT OR Apache-2.0
//! Tuples of small state pairs, exact per-index distances and the verdict
//! on whether some index is far apart or every index is close.

use serde::{Deserialize, Serialize};

use super::prep::{prepare_state, StatePrepCircuit};
use crate::error::{Error, Result};
use crate::linalg::{tensor_all, trace_distance, trace_distance_matrices, ComplexMatrix, DensityMatrix};

/// Default lower bound on `α − δ·k`.
pub const DEFAULT_PROMISE_FLOOR: f64 = 1e-3;

/// Largest total output size for which the full product distance is
/// computed.
pub const MAX_EXACT_QUBITS: usize = 10;

/// `k` pairs of preparation circuits with thresholds `α` and `δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct IndivProdInstance {
    k: usize,
    pairs: Vec<(StatePrepCircuit, StatePrepCircuit)>,
    alpha: f64,
    delta: f64,
}

#[derive(Serialize, Deserialize)]
struct PairRepr {
    #[serde(rename = "Q")]
    q: StatePrepCircuit,
    #[serde(rename = "Qp")]
    qp: StatePrepCircuit,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    k: usize,
    alpha: f64,
    delta: f64,
    pairs: Vec<PairRepr>,
}

impl TryFrom<InstanceRepr> for IndivProdInstance {
    type Error = Error;
    fn try_from(r: InstanceRepr) -> Result<Self> {
        if r.k != r.pairs.len() {
            return Err(Error::Validation(format!("k = {} but {} pairs were given", r.k, r.pairs.len())));
        }
        Self::new(r.pairs.into_iter().map(|p| (p.q, p.qp)).collect(), r.alpha, r.delta)
    }
}

impl From<IndivProdInstance> for InstanceRepr {
    fn from(i: IndivProdInstance) -> Self {
        InstanceRepr {
            k: i.k,
            alpha: i.alpha,
            delta: i.delta,
            pairs: i.pairs.into_iter().map(|(q, qp)| PairRepr { q, qp }).collect(),
        }
    }
}

impl IndivProdInstance {
    pub fn new(pairs: Vec<(StatePrepCircuit, StatePrepCircuit)>, alpha: f64, delta: f64) -> Result<Self> {
        Self::with_floor(pairs, alpha, delta, DEFAULT_PROMISE_FLOOR)
    }

    pub fn with_floor(
        pairs: Vec<(StatePrepCircuit, StatePrepCircuit)>,
        alpha: f64,
        delta: f64,
        floor: f64,
    ) -> Result<Self> {
        let k = pairs.len();
        if k == 0 {
            return Err(Error::Validation("an instance needs at least one pair".into()));
        }
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&delta) {
            return Err(Error::Parameter(format!("alpha = {alpha} and delta = {delta} must lie in [0, 1]")));
        }
        if alpha - delta * (k as f64) < floor {
            return Err(Error::Parameter(format!(
                "alpha - delta*k = {} is below the promise floor {floor}",
                alpha - delta * k as f64
            )));
        }
        for (j, (q, qp)) in pairs.iter().enumerate() {
            if q.num_outputs() != qp.num_outputs() {
                return Err(Error::Validation(format!(
                    "pair {j} has {} and {} output qubits",
                    q.num_outputs(),
                    qp.num_outputs()
                )));
            }
        }
        Ok(Self { k, pairs, alpha, delta })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pairs(&self) -> &[(StatePrepCircuit, StatePrepCircuit)] {
        &self.pairs
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Sum of the output sizes of the first member of every pair.
    pub fn total_output_qubits(&self) -> usize {
        self.pairs.iter().map(|(q, _)| q.num_outputs()).sum()
    }

    /// Prepared states `(σ_j, σ'_j)`, one thread per pair.
    pub fn states(&self) -> Result<Vec<(DensityMatrix, DensityMatrix)>> {
        std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .pairs
                .iter()
                .map(|(q, qp)| scope.spawn(move || Ok((prepare_state(q)?, prepare_state(qp)?))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("state preparation thread panicked")).collect()
        })
    }

    /// `T(σ_j, σ'_j)` for every index.
    pub fn distances(&self) -> Result<Vec<f64>> {
        self.states()?.iter().map(|(a, b)| trace_distance(a, b)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IndivProdVerdict {
    /// Index `witness` has distance at least `α/k`.
    Yes { witness: usize },
    /// Every distance is at most `δ`.
    No,
    PromiseViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndivProdReport {
    pub verdict: IndivProdVerdict,
    pub distances: Vec<f64>,
    pub threshold: f64,
    pub delta: f64,
}

/// Decides an instance from exact per-index trace distances.
pub fn decide_indivprod(inst: &IndivProdInstance) -> Result<IndivProdReport> {
    let distances = inst.distances()?;
    let threshold = inst.alpha / inst.k as f64;
    let far = distances.iter().enumerate().filter(|(_, &t)| t >= threshold).max_by(|a, b| a.1.total_cmp(b.1));
    let verdict = match far {
        Some((j, _)) => IndivProdVerdict::Yes { witness: j },
        None if distances.iter().all(|&t| t <= inst.delta) => IndivProdVerdict::No,
        None => IndivProdVerdict::PromiseViolation,
    };
    Ok(IndivProdReport { verdict, distances, threshold, delta: inst.delta })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBounds {
    /// `max_j T_j`.
    pub lower: f64,
    /// `Σ_j T_j`.
    pub upper: f64,
    /// Distance between the two full products, when small enough.
    pub exact: Option<f64>,
}

/// Bounds on the distance between `⊗σ_j` and `⊗σ'_j`, plus its exact
/// value when the product has at most [`MAX_EXACT_QUBITS`] qubits.
pub fn product_distance_bounds(inst: &IndivProdInstance) -> Result<ProductBounds> {
    let states = inst.states()?;
    let ds = states.iter().map(|(a, b)| trace_distance(a, b)).collect::<Result<Vec<_>>>()?;
    let lower = ds.iter().copied().fold(0.0, f64::max);
    let upper = ds.iter().sum();
    let exact = if inst.total_output_qubits() <= MAX_EXACT_QUBITS {
        let left: Vec<&ComplexMatrix> = states.iter().map(|(a, _)| a.matrix()).collect();
        let right: Vec<&ComplexMatrix> = states.iter().map(|(_, b)| b.matrix()).collect();
        Some(trace_distance_matrices(&tensor_all(&left)?, &tensor_all(&right)?).clamp(0.0, 1.0))
    } else {
        None
    };
    Ok(ProductBounds { lower, upper, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{ActionKind, CircuitAction, Gate};

    fn single(gates: Vec<Gate>) -> StatePrepCircuit {
        StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, 1, gates).unwrap(), vec![0]).unwrap()
    }

    #[test]
    fn orthogonal_pair_is_yes() {
        let inst = IndivProdInstance::new(vec![(single(vec![]), single(vec![Gate::x(0)]))], 0.9, 0.1).unwrap();
        let r = decide_indivprod(&inst).unwrap();
        assert_eq!(r.verdict, IndivProdVerdict::Yes { witness: 0 });
    }

    #[test]
    fn identical_pairs_are_no() {
        let p = single(vec![Gate::H(0)]);
        let inst = IndivProdInstance::new(vec![(p.clone(), p.clone()), (p.clone(), p)], 0.5, 0.1).unwrap();
        assert_eq!(decide_indivprod(&inst).unwrap().verdict, IndivProdVerdict::No);
        let b = product_distance_bounds(&inst).unwrap();
        assert!(b.lower.abs() < 1e-12 && b.upper.abs() < 1e-12 && b.exact.unwrap().abs() < 1e-12);
    }

    #[test]
    fn promise_floor_is_enforced() {
        let p = single(vec![]);
        assert!(IndivProdInstance::new(vec![(p.clone(), p.clone()), (p.clone(), p)], 0.2, 0.1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = IndivProdInstance::new(vec![(single(vec![Gate::H(0)]), single(vec![]))], 0.9, 0.1).unwrap();
        let s = serde_json::to_string(&inst).unwrap();
        assert!(s.contains("\"Qp\""));
        let back: IndivProdInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inst);
    }
}
