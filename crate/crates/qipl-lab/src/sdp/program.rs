// SPDX-License-Identifier: MIT OR Apache-2.0
//! Block-structured complex Hermitian SDPs in a form that serializes to
//! JSON and that the solver consumes.
//!
//! The program is
//!
//! ```text
//! maximize   constant + Σ_b Re Tr(C_b X_b)
//! subject to Σ_t Re Tr(A_t X_{block(t)}) = rhs   for every constraint
//!            X_b ⪰ 0
//! ```
//!
//! where a term's coefficient is either the sparse matrix `E` itself or
//! `F E F†` for one of the program's shared frames `F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub name: String,
    pub dim: usize,
    /// Map `P` from the block's coordinates into the full register, so
    /// the full-space state is `P X P†`. Absent means identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<ComplexMatrix>,
    /// Qubit split of the full register.
    #[serde(default)]
    pub qubit_dims: Vec<usize>,
}

impl BlockInfo {
    pub fn full_dim(&self) -> usize {
        self.embedding.as_ref().map_or(self.dim, ComplexMatrix::rows)
    }
}

/// Sparse matrix entry `(row, col, value)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry(pub usize, pub usize, pub C64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub block: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<usize>,
    /// All nonzeros of a Hermitian matrix (both triangles).
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub rhs: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerm {
    pub block: usize,
    pub matrix: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpProgram {
    pub blocks: Vec<BlockInfo>,
    #[serde(default)]
    pub frames: Vec<ComplexMatrix>,
    pub objective: Vec<ObjectiveTerm>,
    #[serde(default)]
    pub objective_constant: f64,
    pub constraints: Vec<Constraint>,
}

impl SdpProgram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("program serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    /// Side length of the coefficient matrix of a term.
    fn coef_dim(&self, t: &Term) -> Result<usize> {
        let b = self.blocks.get(t.block).ok_or_else(|| Error::Validation(format!("no block {}", t.block)))?;
        match t.frame {
            None => Ok(b.dim),
            Some(f) => {
                let fr = self.frames.get(f).ok_or_else(|| Error::Validation(format!("no frame {f}")))?;
                if fr.rows() != b.dim {
                    return Err(Error::Validation(format!(
                        "frame {f} has {} rows, block {} has dim {}",
                        fr.rows(),
                        t.block,
                        b.dim
                    )));
                }
                Ok(fr.cols())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.blocks.iter().enumerate() {
            if let Some(p) = &b.embedding {
                if p.cols() != b.dim {
                    return Err(Error::Validation(format!("block {i}: embedding has {} columns", p.cols())));
                }
            }
        }
        for o in &self.objective {
            let dim = self.blocks.get(o.block).map(|b| b.dim).ok_or_else(|| {
                Error::Validation(format!("objective names missing block {}", o.block))
            })?;
            if o.matrix.shape() != (dim, dim) || !o.matrix.is_hermitian(1e-9) {
                return Err(Error::Validation(format!("objective on block {} is not a Hermitian {dim}x{dim}", o.block)));
            }
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            for t in &c.terms {
                let k = self.coef_dim(t)?;
                let mut dense = ComplexMatrix::zeros(k, k);
                for &Entry(r, col, z) in &t.entries {
                    if r >= k || col >= k {
                        return Err(Error::Validation(format!("constraint {ci}: entry ({r},{col}) outside {k}x{k}")));
                    }
                    dense[(r, col)] += z;
                }
                if dense.hermiticity_error() > 1e-9 * dense.max_abs().max(1.0) {
                    return Err(Error::Validation(format!("constraint {ci}: coefficient is not Hermitian")));
                }
            }
            if !c.rhs.is_finite() {
                return Err(Error::Validation(format!("constraint {ci}: non-finite rhs")));
            }
        }
        Ok(())
    }

    /// `Re Tr(A X)` for one term.
    fn term_value(&self, t: &Term, x: &ComplexMatrix) -> f64 {
        let proj;
        let m = match t.frame {
            None => x,
            Some(f) => {
                let fr = &self.frames[f];
                proj = fr.adjoint().matmul(x).matmul(fr);
                &proj
            }
        };
        t.entries.iter().map(|&Entry(r, c, z)| (z * m[(c, r)]).re).sum()
    }

    /// Left-hand sides of all constraints at the given block variables.
    pub fn constraint_values(&self, xs: &[ComplexMatrix]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|c| c.terms.iter().map(|t| self.term_value(t, &xs[t.block])).sum())
            .collect()
    }

    /// Euclidean norm of the constraint residual vector.
    pub fn residual_norm(&self, xs: &[ComplexMatrix]) -> f64 {
        self.constraint_values(xs)
            .iter()
            .zip(&self.constraints)
            .map(|(v, c)| (v - c.rhs).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn objective_value(&self, xs: &[ComplexMatrix]) -> f64 {
        self.objective_constant + self.objective.iter().map(|o| o.matrix.inner_re(&xs[o.block])).sum::<f64>()
    }

    /// Full-register matrix `P X P†` for a block variable.
    pub fn embed(&self, block: usize, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.blocks[block].embedding {
            None => x.clone(),
            Some(p) => p.conjugate(x),
        }
    }
}

/// Hermitian basis of `k×k` matrices: `E_aa`, then for `a < b` the pair
/// `E_ab + E_ba` and `i(E_ab − E_ba)`. Each element is given as entries.
pub(crate) fn hermitian_basis(k: usize) -> Vec<Vec<Entry>> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        out.push(vec![Entry(a, a, one)]);
    }
    for a in 0..k {
        for b in a + 1..k {
            out.push(vec![Entry(a, b, one), Entry(b, a, one)]);
            out.push(vec![Entry(a, b, i), Entry(b, a, -i)]);
        }
    }
    out
}

/// `I_d ⊗ H` given the entries of `H` on a `k`-dimensional factor.
pub(crate) fn identity_kron(d: usize, k: usize, h: &[Entry]) -> Vec<Entry> {
    let mut out = Vec::with_capacity(d * h.len());
    for m in 0..d {
        for &Entry(r, c, z) in h {
            out.push(Entry(m * k + r, m * k + c, z));
        }
    }
    out
}
