// SPDX-License-Identifier: MIT OR Apache-2.0
//! One verifier turn: a gate list over the (M, W) register plus the
//! environment wires its measurements and ancillas create.

use serde::{Deserialize, Serialize};

use super::gate::{apply_lowered, Gate, Lowered};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64};

/// Largest isometry `to_isometry` will materialize, in entries.
const ISOMETRY_ENTRY_CAP: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Unitary,
    AlmostUnitary,
    Isometric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitAction {
    pub kind: ActionKind,
    /// Width of the (M, W) register the action acts on. Zero in JSON input
    /// means "fill in from the verifier".
    #[serde(default)]
    pub in_qubits: usize,
    pub gates: Vec<Gate>,
}

impl CircuitAction {
    /// Builds and validates an action.
    pub fn new(kind: ActionKind, in_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let a = Self { kind, in_qubits, gates };
        a.check()?;
        Ok(a)
    }

    pub fn identity(in_qubits: usize) -> Self {
        Self { kind: ActionKind::Unitary, in_qubits, gates: vec![] }
    }

    /// Number of environment wires created by `Measure` and `Ancilla`.
    pub fn env_count(&self) -> usize {
        self.gates.iter().filter(|g| g.creates_wire()).count()
    }

    pub fn measure_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Measure(_))).count()
    }

    pub fn total_wires(&self) -> usize {
        self.in_qubits + self.env_count()
    }

    /// Environment wires that are dephased at the end of the turn. Only
    /// almost-unitary actions dephase; isometric ones keep every wire live.
    pub fn measured_wires(&self) -> Vec<usize> {
        if self.kind != ActionKind::AlmostUnitary {
            return vec![];
        }
        (self.in_qubits..self.total_wires()).collect()
    }

    /// The same gates reinterpreted with every environment wire kept live.
    pub fn lifted(&self) -> Self {
        let kind = match self.kind {
            ActionKind::AlmostUnitary => ActionKind::Isometric,
            k => k,
        };
        Self { kind, ..self.clone() }
    }

    pub fn check(&self) -> Result<()> {
        let mut width = self.in_qubits;
        let mut measure_created = vec![false; self.in_qubits];
        for (i, g) in self.gates.iter().enumerate() {
            let fail = |msg: String| Err(Error::Validation(format!("gate {i}: {msg}")));
            g.check().map_err(|e| Error::Validation(format!("gate {i}: {e}")))?;
            match (self.kind, g) {
                (ActionKind::Unitary, Gate::Measure(_) | Gate::Ancilla) => {
                    return fail("unitary action may not measure or allocate ancillas".into())
                }
                (ActionKind::AlmostUnitary, Gate::Ancilla) => {
                    return fail("almost-unitary action may not allocate ancillas".into())
                }
                _ => {}
            }
            for w in g.wires() {
                if w >= width {
                    return fail(format!("wire {w} does not exist yet (width {width})"));
                }
                if measure_created[w] {
                    return fail(format!("wire {w} holds a measurement record and is read-only"));
                }
            }
            if g.creates_wire() {
                measure_created.push(matches!(g, Gate::Measure(_)));
                width += 1;
            }
        }
        Ok(())
    }

    /// Gates lowered with wires relabelled through `pos`; `pos` must cover
    /// all `total_wires()` wires.
    pub(crate) fn lowered(&self, pos: &dyn Fn(usize) -> usize) -> Vec<Lowered> {
        let mut next = self.in_qubits;
        let mut out = Vec::new();
        for g in &self.gates {
            let created = g.creates_wire().then(|| {
                next += 1;
                next - 1
            });
            if let Some(low) = g.lower(created) {
                out.push(Lowered {
                    controls: low.controls.iter().map(|&(w, v)| (pos(w), v)).collect(),
                    targets: low.targets.iter().map(|&w| pos(w)).collect(),
                    matrix: low.matrix,
                });
            }
        }
        out
    }

    /// Deferred-measurement isometry of shape `2^{in+e} × 2^{in}`; rows are
    /// ordered (in, env) with wire 0 most significant.
    pub fn to_isometry(&self) -> Result<ComplexMatrix> {
        self.check()?;
        let (n, e) = (self.in_qubits, self.env_count());
        let rows = 1usize.checked_shl((n + e) as u32).unwrap_or(usize::MAX);
        let cols = 1usize << n;
        if rows.saturating_mul(cols) > ISOMETRY_ENTRY_CAP {
            return Err(Error::Size(format!("isometry on {n}+{e} wires is too large to materialize")));
        }
        let mut data = vec![c(0.0, 0.0); rows * cols];
        for x in 0..cols {
            data[(x << e) * cols + x] = c(1.0, 0.0);
        }
        for low in self.lowered(&|w| w) {
            apply_lowered(&mut data, cols, n + e, &low);
        }
        ComplexMatrix::from_vec(rows, cols, data)
    }

    /// Inverse of a unitary action (gates inverted, order reversed).
    pub fn inverse(&self) -> Result<Self> {
        if self.kind != ActionKind::Unitary {
            return Err(Error::Validation("only unitary actions can be inverted".into()));
        }
        let gates = self.gates.iter().rev().map(Gate::inverse).collect::<Result<Vec<_>>>()?;
        Ok(Self { kind: ActionKind::Unitary, in_qubits: self.in_qubits, gates })
    }

    /// Re-targets the action at a wider register: input wire `w` becomes
    /// `f(w)`; created wires keep their relative order after `new_in`.
    pub fn remap(&self, new_in: usize, f: impl Fn(usize) -> usize) -> Self {
        let old_in = self.in_qubits;
        let map = |w: usize| if w < old_in { f(w) } else { new_in + (w - old_in) };
        Self { kind: self.kind, in_qubits: new_in, gates: self.gates.iter().map(|g| g.map_wires(map)).collect() }
    }

    /// Every gate made conditional on `controls` (unitary actions only).
    pub fn controlled(&self, controls: &[(usize, bool)]) -> Result<Vec<Gate>> {
        self.gates.iter().map(|g| g.with_controls(controls)).collect()
    }
}

/// Applies an action to state columns laid out as
/// `(prefix qubits, action input wires, live env qubits)`; the action's new
/// wires are appended at the end. Returns the enlarged array.
pub(crate) fn forward_action(
    data: &[C64],
    ncols: usize,
    prefix: usize,
    live: usize,
    action: &CircuitAction,
) -> Vec<C64> {
    let (n, e) = (action.in_qubits, action.env_count());
    let nq_old = prefix + n + live;
    let nq = nq_old + e;
    let rows_old = 1usize << nq_old;
    let mut out = vec![c(0.0, 0.0); (rows_old << e) * ncols];
    for r in 0..rows_old {
        out[(r << e) * ncols..((r << e) + 1) * ncols].copy_from_slice(&data[r * ncols..(r + 1) * ncols]);
    }
    let pos = |w: usize| if w < n { prefix + w } else { nq_old + (w - n) };
    for low in action.lowered(&pos) {
        apply_lowered(&mut out, ncols, nq, &low);
    }
    out
}

/// Adjoint of [`forward_action`]: undoes the gates and projects the
/// trailing environment wires onto `|0⟩`.
pub(crate) fn adjoint_action(
    data: &[C64],
    ncols: usize,
    prefix: usize,
    live: usize,
    action: &CircuitAction,
) -> Vec<C64> {
    let (n, e) = (action.in_qubits, action.env_count());
    let nq_old = prefix + n + live;
    let nq = nq_old + e;
    let mut work = data.to_vec();
    let pos = |w: usize| if w < n { prefix + w } else { nq_old + (w - n) };
    for low in action.lowered(&pos).into_iter().rev() {
        let inv = Lowered { controls: low.controls, targets: low.targets, matrix: low.matrix.adjoint() };
        apply_lowered(&mut work, ncols, nq, &inv);
    }
    let rows_old = 1usize << nq_old;
    let mut out = vec![c(0.0, 0.0); rows_old * ncols];
    for r in 0..rows_old {
        out[r * ncols..(r + 1) * ncols].copy_from_slice(&work[(r << e) * ncols..((r << e) + 1) * ncols]);
    }
    out
}
