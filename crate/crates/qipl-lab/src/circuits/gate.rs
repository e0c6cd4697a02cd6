// SPDX-License-Identifier: MIT OR Apache-2.0
//! Gates and the kernel that applies them to state vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64, STRUCT_TOL};

/// Largest number of target wires a raw or controlled unitary may act on.
pub const MAX_RAW_WIRES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRepr", into = "GateRepr")]
pub enum Gate {
    H(usize),
    T(usize),
    Cnot { control: usize, target: usize },
    Swap(usize, usize),
    /// Arbitrary unitary on up to three wires; the first wire is the most
    /// significant bit of the matrix index.
    Raw { wires: Vec<usize>, matrix: ComplexMatrix },
    /// `matrix` on `targets`, applied only when every control wire holds
    /// its listed value.
    Controlled { controls: Vec<(usize, bool)>, targets: Vec<usize>, matrix: ComplexMatrix },
    /// Pinching measurement of one wire, realized as a copy onto a fresh
    /// environment wire.
    Measure(usize),
    /// Introduces a fresh wire in state `|0⟩`.
    Ancilla,
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    #[serde(default)]
    wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control_values: Option<Vec<bool>>,
}

impl TryFrom<GateRepr> for Gate {
    type Error = Error;
    fn try_from(r: GateRepr) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if r.wires.len() != n {
                return Err(Error::Parse(format!("{} gate takes {n} wire(s), got {}", r.kind, r.wires.len())));
            }
            Ok(())
        };
        let g = match r.kind.as_str() {
            "H" => {
                want(1)?;
                Gate::H(r.wires[0])
            }
            "T" => {
                want(1)?;
                Gate::T(r.wires[0])
            }
            "CNOT" => {
                want(2)?;
                Gate::Cnot { control: r.wires[0], target: r.wires[1] }
            }
            "SWAP" => {
                want(2)?;
                Gate::Swap(r.wires[0], r.wires[1])
            }
            "Measure" => {
                want(1)?;
                Gate::Measure(r.wires[0])
            }
            "Ancilla" => {
                want(0)?;
                Gate::Ancilla
            }
            "RawUnitary" => Gate::Raw {
                wires: r.wires,
                matrix: r.matrix.ok_or_else(|| Error::Parse("RawUnitary needs a matrix".into()))?,
            },
            "Controlled" => {
                let values = r
                    .control_values
                    .ok_or_else(|| Error::Parse("Controlled needs control_values".into()))?;
                if values.len() > r.wires.len() {
                    return Err(Error::Parse("more control values than wires".into()));
                }
                let controls = r.wires.iter().copied().zip(values.iter().copied()).collect();
                let targets = r.wires[values.len()..].to_vec();
                Gate::Controlled {
                    controls,
                    targets,
                    matrix: r.matrix.ok_or_else(|| Error::Parse("Controlled needs a matrix".into()))?,
                }
            }
            other => return Err(Error::Parse(format!("unknown gate kind {other:?}"))),
        };
        Ok(g)
    }
}

impl From<Gate> for GateRepr {
    fn from(g: Gate) -> Self {
        let simple = |kind: &str, wires: Vec<usize>| GateRepr {
            kind: kind.into(),
            wires,
            matrix: None,
            control_values: None,
        };
        match g {
            Gate::H(w) => simple("H", vec![w]),
            Gate::T(w) => simple("T", vec![w]),
            Gate::Cnot { control, target } => simple("CNOT", vec![control, target]),
            Gate::Swap(a, b) => simple("SWAP", vec![a, b]),
            Gate::Measure(w) => simple("Measure", vec![w]),
            Gate::Ancilla => simple("Ancilla", vec![]),
            Gate::Raw { wires, matrix } => GateRepr {
                kind: "RawUnitary".into(),
                wires,
                matrix: Some(matrix),
                control_values: None,
            },
            Gate::Controlled { controls, targets, matrix } => {
                let mut wires: Vec<usize> = controls.iter().map(|&(w, _)| w).collect();
                wires.extend(targets);
                GateRepr {
                    kind: "Controlled".into(),
                    wires,
                    matrix: Some(matrix),
                    control_values: Some(controls.iter().map(|&(_, v)| v).collect()),
                }
            }
        }
    }
}

pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h])
}

pub fn t_matrix() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::diagonal(&[c(1.0, 0.0), c(h, h)])
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn swap_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m[(r, col)] = c(1.0, 0.0);
    }
    m
}

/// A gate lowered to "apply `matrix` to `targets` when `controls` match".
pub(crate) struct Lowered {
    pub controls: Vec<(usize, bool)>,
    pub targets: Vec<usize>,
    pub matrix: ComplexMatrix,
}

impl Gate {
    /// Builds a multi-controlled X.
    pub fn mcx(controls: Vec<(usize, bool)>, target: usize) -> Gate {
        Gate::Controlled { controls, targets: vec![target], matrix: pauli_x() }
    }

    pub fn x(wire: usize) -> Gate {
        Gate::Raw { wires: vec![wire], matrix: pauli_x() }
    }

    /// Every wire index the gate names (for `Measure`, the measured wire).
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::H(w) | Gate::T(w) | Gate::Measure(w) => vec![*w],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Raw { wires, .. } => wires.clone(),
            Gate::Controlled { controls, targets, .. } => {
                controls.iter().map(|&(w, _)| w).chain(targets.iter().copied()).collect()
            }
            Gate::Ancilla => vec![],
        }
    }

    pub fn creates_wire(&self) -> bool {
        matches!(self, Gate::Measure(_) | Gate::Ancilla)
    }

    /// Structural checks that do not depend on the surrounding circuit.
    pub fn check(&self) -> Result<()> {
        let ws = self.wires();
        let mut sorted = ws.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ws.len() {
            return Err(Error::Validation(format!("gate repeats a wire: {ws:?}")));
        }
        let (targets, matrix) = match self {
            Gate::Raw { wires, matrix } => (wires, matrix),
            Gate::Controlled { targets, matrix, .. } => (targets, matrix),
            _ => return Ok(()),
        };
        if targets.is_empty() || targets.len() > MAX_RAW_WIRES {
            return Err(Error::Validation(format!(
                "raw unitary must act on 1..={MAX_RAW_WIRES} wires, got {}",
                targets.len()
            )));
        }
        let dim = 1usize << targets.len();
        if matrix.shape() != (dim, dim) {
            return Err(Error::Validation(format!(
                "raw unitary on {} wires must be {dim}x{dim}, got {}x{}",
                targets.len(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_unitary(STRUCT_TOL) {
            return Err(Error::Validation(format!(
                "raw matrix is not unitary (deviation {:.3e})",
                matrix.isometry_error()
            )));
        }
        Ok(())
    }

    /// Inverse gate. Wire-creating gates have none.
    pub fn inverse(&self) -> Result<Gate> {
        Ok(match self {
            Gate::H(_) | Gate::Cnot { .. } | Gate::Swap(..) => self.clone(),
            Gate::T(w) => Gate::Raw { wires: vec![*w], matrix: t_matrix().adjoint() },
            Gate::Raw { wires, matrix } => Gate::Raw { wires: wires.clone(), matrix: matrix.adjoint() },
            Gate::Controlled { controls, targets, matrix } => Gate::Controlled {
                controls: controls.clone(),
                targets: targets.clone(),
                matrix: matrix.adjoint(),
            },
            Gate::Measure(_) | Gate::Ancilla => {
                return Err(Error::Validation("measurement and ancilla gates are not invertible".into()))
            }
        })
    }

    /// Renames wires through `f`.
    pub fn map_wires(&self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(w) => Gate::H(f(*w)),
            Gate::T(w) => Gate::T(f(*w)),
            Gate::Measure(w) => Gate::Measure(f(*w)),
            Gate::Ancilla => Gate::Ancilla,
            Gate::Cnot { control, target } => Gate::Cnot { control: f(*control), target: f(*target) },
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
            Gate::Raw { wires, matrix } => {
                Gate::Raw { wires: wires.iter().map(|&w| f(w)).collect(), matrix: matrix.clone() }
            }
            Gate::Controlled { controls, targets, matrix } => Gate::Controlled {
                controls: controls.iter().map(|&(w, v)| (f(w), v)).collect(),
                targets: targets.iter().map(|&w| f(w)).collect(),
                matrix: matrix.clone(),
            },
        }
    }

    /// Adds extra control conditions to a unitary gate.
    pub fn with_controls(&self, extra: &[(usize, bool)]) -> Result<Gate> {
        if extra.is_empty() {
            return Ok(self.clone());
        }
        let low = self
            .lower(None)
            .ok_or_else(|| Error::Validation("cannot control a wire-creating gate".into()))?;
        let mut controls = extra.to_vec();
        controls.extend(low.controls);
        Ok(Gate::Controlled { controls, targets: low.targets, matrix: low.matrix })
    }

    /// Lowers the gate. `created` is the wire a `Measure` copies into.
    pub(crate) fn lower(&self, created: Option<usize>) -> Option<Lowered> {
        let plain = |targets: Vec<usize>, matrix: ComplexMatrix| Lowered { controls: vec![], targets, matrix };
        Some(match self {
            Gate::H(w) => plain(vec![*w], hadamard()),
            Gate::T(w) => plain(vec![*w], t_matrix()),
            Gate::Cnot { control, target } => {
                Lowered { controls: vec![(*control, true)], targets: vec![*target], matrix: pauli_x() }
            }
            Gate::Swap(a, b) => plain(vec![*a, *b], swap_matrix()),
            Gate::Raw { wires, matrix } => plain(wires.clone(), matrix.clone()),
            Gate::Controlled { controls, targets, matrix } => {
                Lowered { controls: controls.clone(), targets: targets.clone(), matrix: matrix.clone() }
            }
            Gate::Measure(w) => Lowered {
                controls: vec![(*w, true)],
                targets: vec![created?],
                matrix: pauli_x(),
            },
            Gate::Ancilla => return None,
        })
    }
}

/// Applies `u` to the qubits at `targets` (positions in an `nq`-qubit
/// register, position 0 most significant) of every column of a row-major
/// `2^nq × ncols` array, restricted to rows whose `controls` match.
pub(crate) fn apply_lowered(data: &mut [C64], ncols: usize, nq: usize, low: &Lowered) {
    let t = low.targets.len();
    let sub = 1usize << t;
    debug_assert_eq!(data.len(), ncols << nq);
    let tmask: Vec<usize> = low.targets.iter().map(|&p| 1usize << (nq - 1 - p)).collect();
    let all_t: usize = tmask.iter().sum();
    let mut cmask = 0usize;
    let mut cval = 0usize;
    for &(p, v) in &low.controls {
        let b = 1usize << (nq - 1 - p);
        cmask |= b;
        if v {
            cval |= b;
        }
    }
    let offsets: Vec<usize> = (0..sub)
        .map(|s| (0..t).filter(|&i| s >> (t - 1 - i) & 1 == 1).map(|i| tmask[i]).sum())
        .collect();
    let u = low.matrix.data();
    let mut gathered = vec![c(0.0, 0.0); sub];
    for base in 0..(1usize << nq) {
        if base & all_t != 0 || base & cmask != cval {
            continue;
        }
        for col in 0..ncols {
            for (s, &off) in offsets.iter().enumerate() {
                gathered[s] = data[(base + off) * ncols + col];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let row = &u[r * sub..(r + 1) * sub];
                data[(base + off) * ncols + col] = row.iter().zip(&gathered).map(|(a, b)| a * b).sum();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let gates = vec![
            Gate::H(0),
            Gate::Cnot { control: 0, target: 1 },
            Gate::Measure(1),
            Gate::Ancilla,
            Gate::mcx(vec![(0, false), (2, true)], 1),
            Gate::Raw { wires: vec![1], matrix: hadamard() },
        ];
        let s = serde_json::to_string(&gates).unwrap();
        let back: Vec<Gate> = serde_json::from_str(&s).unwrap();
        assert_eq!(gates, back);
    }

    #[test]
    fn non_unitary_raw_rejected() {
        let g = Gate::Raw { wires: vec![0], matrix: ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]) };
        assert!(matches!(g.check(), Err(Error::Validation(_))));
    }

    #[test]
    fn four_wire_raw_rejected() {
        let g = Gate::Raw { wires: vec![0, 1, 2, 3], matrix: ComplexMatrix::identity(16) };
        assert!(g.check().is_err());
    }

    #[test]
    fn cnot_kernel_flips_target() {
        // |10⟩ -> |11⟩
        let mut v = vec![c(0.0, 0.0); 4];
        v[2] = c(1.0, 0.0);
        let low = Gate::Cnot { control: 0, target: 1 }.lower(None).unwrap();
        apply_lowered(&mut v, 1, 2, &low);
        assert_eq!(v[3], c(1.0, 0.0));
        assert_eq!(v[2], c(0.0, 0.0));
    }

    #[test]
    fn unknown_kind_is_parse_error() {
        assert!(serde_json::from_str::<Gate>(r#"{"kind":"Z","wires":[0]}"#).is_err());
    }
}
