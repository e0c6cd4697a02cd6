// SPDX-License-Identifier: MIT OR Apache-2.0
//! Unitary circuits that prepare a state on a chosen set of output wires.

use serde::{Deserialize, Serialize};

use crate::circuits::{forward_action, ActionKind, Caps, CircuitAction, Gate};
use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, ComplexMatrix, DensityMatrix, C64};

/// Amplitudes below this are treated as an unreachable branch during
/// synthesis.
const SYNTH_FLOOR: f64 = 1e-14;

/// A unitary circuit run on `|0…0⟩`, keeping `output_qubits` (in the
/// listed order) and tracing out the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PrepRepr", into = "PrepRepr")]
pub struct StatePrepCircuit {
    circuit: CircuitAction,
    output_qubits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PrepRepr {
    circuit: CircuitAction,
    output_qubits: Vec<usize>,
}

impl TryFrom<PrepRepr> for StatePrepCircuit {
    type Error = Error;
    fn try_from(r: PrepRepr) -> Result<Self> {
        let mut circuit = r.circuit;
        if circuit.in_qubits == 0 {
            let widest = circuit.gates.iter().flat_map(|g| g.wires()).chain(r.output_qubits.iter().copied()).max();
            circuit.in_qubits = widest.map_or(0, |w| w + 1);
        }
        StatePrepCircuit::new(circuit, r.output_qubits)
    }
}

impl From<StatePrepCircuit> for PrepRepr {
    fn from(p: StatePrepCircuit) -> Self {
        PrepRepr { circuit: p.circuit, output_qubits: p.output_qubits }
    }
}

impl StatePrepCircuit {
    pub fn new(circuit: CircuitAction, output_qubits: Vec<usize>) -> Result<Self> {
        circuit.check()?;
        if circuit.kind != ActionKind::Unitary {
            return Err(Error::Validation("state preparation circuits must be unitary".into()));
        }
        let cap = Caps::default().max_register_qubits;
        if circuit.in_qubits > cap {
            return Err(Error::Size(format!("{} wires exceed the cap of {cap}", circuit.in_qubits)));
        }
        if output_qubits.is_empty() {
            return Err(Error::Validation("a state preparation needs at least one output wire".into()));
        }
        let mut seen = vec![false; circuit.in_qubits];
        for &w in &output_qubits {
            if w >= circuit.in_qubits || std::mem::replace(&mut seen[w], true) {
                return Err(Error::Validation(format!(
                    "output wire {w} is repeated or outside 0..{}",
                    circuit.in_qubits
                )));
            }
        }
        Ok(Self { circuit, output_qubits })
    }

    pub fn circuit(&self) -> &CircuitAction {
        &self.circuit
    }

    pub fn output_qubits(&self) -> &[usize] {
        &self.output_qubits
    }

    pub fn num_outputs(&self) -> usize {
        self.output_qubits.len()
    }

    /// Same circuit, different output wires.
    pub fn with_outputs(&self, output_qubits: Vec<usize>) -> Result<Self> {
        Self::new(self.circuit.clone(), output_qubits)
    }

    /// Circuit preparing the pure state `amplitudes` on wires
    /// `0..log₂(len)`, all of them outputs.
    pub fn from_pure_state(amplitudes: &[C64]) -> Result<Self> {
        let n = qubits_for(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Argument(format!("state has norm {norm}, expected 1")));
        }
        let wires: Vec<usize> = (0..n).collect();
        let gates = synthesize(amplitudes, &wires);
        Self::new(CircuitAction::new(ActionKind::Unitary, n, gates)?, wires)
    }

    /// Circuit whose outputs (the first `q` wires) hold `rho`, purified on
    /// `⌈log₂ rank⌉` extra wires.
    pub fn purifying(rho: &DensityMatrix) -> Result<Self> {
        let q = rho.num_qubits();
        let eig = eig_hermitian(rho.matrix())?;
        let kept: Vec<usize> = (0..eig.values.len()).filter(|&i| eig.values[i] > 1e-14).collect();
        let a = qubits_for(kept.len().next_power_of_two().max(1))?;
        let d = 1usize << q;
        let total: f64 = kept.iter().map(|&i| eig.values[i]).sum();
        let mut psi = vec![c(0.0, 0.0); d << a];
        for (slot, &i) in kept.iter().enumerate() {
            let w = (eig.values[i] / total).sqrt();
            for x in 0..d {
                psi[(x << a) | slot] = eig.vectors[(x, i)] * w;
            }
        }
        let wires: Vec<usize> = (0..q + a).collect();
        let gates = synthesize(&psi, &wires);
        Self::new(CircuitAction::new(ActionKind::Unitary, q + a, gates)?, (0..q).collect())
    }

    /// Output state vector of the whole register.
    pub fn full_state(&self) -> Vec<C64> {
        let mut zero = vec![c(0.0, 0.0); 1 << self.circuit.in_qubits];
        zero[0] = c(1.0, 0.0);
        forward_action(&zero, 1, 0, 0, &self.circuit)
    }
}

fn qubits_for(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::Dimension(format!("{len} amplitudes is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Uniformly controlled single-qubit rotations: the `k`-th wire is set
/// conditioned on every value of the wires before it. Norms are loaded at
/// every level and the phases at the last.
fn synthesize(psi: &[C64], wires: &[usize]) -> Vec<Gate> {
    let n = wires.len();
    let mut gates = Vec::new();
    for k in 0..n {
        for p in 0..1usize << k {
            let block = &psi[p << (n - k)..(p + 1) << (n - k)];
            let half = block.len() / 2;
            let n0 = block[..half].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let n1 = block[half..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let total = n0.hypot(n1);
            if total < SYNTH_FLOOR {
                continue;
            }
            let (a, b) = if k + 1 == n { (block[0] / total, block[1] / total) } else { (c(n0 / total, 0.0), c(n1 / total, 0.0)) };
            if (a - c(1.0, 0.0)).norm() < SYNTH_FLOOR && b.norm() < SYNTH_FLOOR {
                continue;
            }
            let u = ComplexMatrix::from_rows(&[vec![a, -b.conj()], vec![b, a.conj()]]).expect("2x2 rows");
            let controls: Vec<(usize, bool)> = (0..k).map(|i| (wires[i], p >> (k - 1 - i) & 1 == 1)).collect();
            gates.push(if controls.is_empty() {
                Gate::Raw { wires: vec![wires[k]], matrix: u }
            } else {
                Gate::Controlled { controls, targets: vec![wires[k]], matrix: u }
            });
        }
    }
    gates
}

/// Runs `prep` on `|0…0⟩` and traces out the non-output wires.
pub fn prepare_state(prep: &StatePrepCircuit) -> Result<DensityMatrix> {
    let psi = prep.full_state();
    let n = prep.circuit.in_qubits;
    let outs = &prep.output_qubits;
    let rest: Vec<usize> = (0..n).filter(|w| !outs.contains(w)).collect();
    let offsets = |ws: &[usize]| -> Vec<usize> {
        (0..1usize << ws.len())
            .map(|v| ws.iter().enumerate().fold(0, |acc, (i, &w)| acc | (v >> (ws.len() - 1 - i) & 1) << (n - 1 - w)))
            .collect()
    };
    let (off_o, off_r) = (offsets(outs), offsets(&rest));
    let d = off_o.len();
    let rho = ComplexMatrix::from_fn(d, d, |i, j| off_r.iter().map(|&t| psi[off_o[i] | t] * psi[off_o[j] | t].conj()).sum());
    DensityMatrix::from_clipped(&rho, vec![outs.len()], true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_pure_state};
    use crate::linalg::trace_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prep(n: usize, gates: Vec<Gate>, outs: Vec<usize>) -> StatePrepCircuit {
        StatePrepCircuit::new(CircuitAction::new(ActionKind::Unitary, n, gates).unwrap(), outs).unwrap()
    }

    #[test]
    fn identity_gives_zero_state() {
        let rho = prepare_state(&prep(1, vec![], vec![0])).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_gives_plus() {
        let rho = prepare_state(&prep(1, vec![Gate::H(0)], vec![0])).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((rho.matrix()[(i, j)].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_marginal_is_mixed() {
        let rho = prepare_state(&prep(2, vec![Gate::H(0), Gate::Cnot { control: 0, target: 1 }], vec![0])).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn output_order_is_respected() {
        let rho = prepare_state(&prep(2, vec![Gate::x(1)], vec![1, 0])).unwrap();
        assert!((rho.matrix()[(2, 2)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthesis_reproduces_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            let psi = random_pure_state(1 << n, &mut rng);
            let p = StatePrepCircuit::from_pure_state(&psi).unwrap();
            let out = p.full_state();
            let overlap: C64 = out.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10);
        }
        for q in 1..=3 {
            let rho = random_density(q, 3, &mut rng);
            let p = StatePrepCircuit::purifying(&rho).unwrap();
            assert!(trace_distance(&prepare_state(&p).unwrap(), &rho).unwrap() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_outputs() {
        let a = CircuitAction::identity(2);
        assert!(StatePrepCircuit::new(a.clone(), vec![]).is_err());
        assert!(StatePrepCircuit::new(a.clone(), vec![0, 0]).is_err());
        assert!(StatePrepCircuit::new(a, vec![2]).is_err());
    }
}
