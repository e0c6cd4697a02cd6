// SPDX-License-Identifier: MIT OR Apache-2.0
//! Density matrices, partial trace, trace distance and fidelity.

use serde::{Deserialize, Serialize};

use super::eig::{clip_psd, eigvals_unchecked, sqrt_psd, svd};
use super::{ComplexMatrix, C64, STRUCT_TOL};
use crate::error::{Error, Result};

/// Hermitian PSD matrix on a register split into qubit subsystems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    qubit_dims: Vec<usize>,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    matrix: ComplexMatrix,
    qubit_dims: Vec<usize>,
    normalized: bool,
}

impl TryFrom<DensityRepr> for DensityMatrix {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        DensityMatrix::new(r.matrix, r.qubit_dims, r.normalized)
    }
}

impl From<DensityMatrix> for DensityRepr {
    fn from(d: DensityMatrix) -> Self {
        DensityRepr { matrix: d.matrix, qubit_dims: d.qubit_dims, normalized: d.normalized }
    }
}

fn check_layout(matrix: &ComplexMatrix, qubit_dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::Dimension(format!(
            "density matrix must be square, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let total: usize = qubit_dims.iter().sum();
    if total >= usize::BITS as usize || 1usize << total != matrix.rows() {
        return Err(Error::Dimension(format!(
            "qubit_dims {:?} imply dimension 2^{total}, matrix is {}",
            qubit_dims,
            matrix.rows()
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// Validates Hermiticity, the eigenvalue floor and (when `normalized`)
    /// unit trace, all at the structural tolerance.
    pub fn new(matrix: ComplexMatrix, qubit_dims: Vec<usize>, normalized: bool) -> Result<Self> {
        check_layout(&matrix, &qubit_dims)?;
        if matrix.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("density matrix has non-finite entries".into()));
        }
        let herr = matrix.hermiticity_error();
        if herr > STRUCT_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::Validation(format!("not Hermitian (deviation {herr:.3e})")));
        }
        let tr = matrix.trace().re;
        let lmin = eigvals_unchecked(&matrix.hermitian_part()).last().copied().unwrap_or(0.0);
        if lmin < -STRUCT_TOL * tr.abs().max(1.0) {
            return Err(Error::Validation(format!("not PSD (min eigenvalue {lmin:.3e})")));
        }
        if normalized && (tr - 1.0).abs() > STRUCT_TOL {
            return Err(Error::Validation(format!("trace {tr} is not 1")));
        }
        Ok(Self { matrix: matrix.hermitian_part(), qubit_dims, normalized })
    }

    /// Projects onto the PSD cone (eigenvalue clipping) and optionally
    /// rescales to unit trace. Meant for solver output.
    pub fn from_clipped(matrix: &ComplexMatrix, qubit_dims: Vec<usize>, normalize: bool) -> Result<Self> {
        check_layout(matrix, &qubit_dims)?;
        let mut m = clip_psd(matrix);
        if normalize {
            let tr = m.trace().re;
            if tr <= 0.0 {
                return Err(Error::Validation("cannot normalize a zero-trace matrix".into()));
            }
            m = m.scale_real(1.0 / tr);
        }
        Ok(Self { matrix: m, qubit_dims, normalized: normalize })
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized if the vector has unit norm.
    pub fn from_pure(state: &[C64], qubit_dims: Vec<usize>) -> Result<Self> {
        let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        let m = ComplexMatrix::outer(state, state);
        check_layout(&m, &qubit_dims)?;
        let normalized = (norm2 - 1.0).abs() <= STRUCT_TOL;
        Ok(Self { matrix: m, qubit_dims, normalized })
    }

    /// Computational basis state `|index⟩⟨index|` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let dim = 1usize << qubits;
        assert!(index < dim, "basis index out of range");
        Self {
            matrix: ComplexMatrix::basis_projector(dim, index),
            qubit_dims: vec![qubits],
            normalized: true,
        }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            qubit_dims: vec![qubits],
            normalized: true,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubit_dims(&self) -> &[usize] {
        &self.qubit_dims
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_dims.iter().sum()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Same matrix with a different subsystem split of the same total size.
    pub fn with_qubit_dims(mut self, qubit_dims: Vec<usize>) -> Result<Self> {
        check_layout(&self.matrix, &qubit_dims)?;
        self.qubit_dims = qubit_dims;
        Ok(self)
    }

    /// `self ⊗ other`; subsystem lists concatenate.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let m = super::tensor(&self.matrix, &other.matrix)?;
        let mut dims = self.qubit_dims.clone();
        dims.extend_from_slice(&other.qubit_dims);
        Ok(Self { matrix: m, qubit_dims: dims, normalized: self.normalized && other.normalized })
    }

    /// `U ρ U†` for a unitary `U` of matching dimension.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (self.dim(), self.dim()) {
            return Err(Error::Dimension(format!(
                "unitary is {}x{}, state dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        let m = u.conjugate(&self.matrix).hermitian_part();
        Ok(Self { matrix: m, qubit_dims: self.qubit_dims.clone(), normalized: self.normalized })
    }
}

/// Partial trace of a matrix over a register with arbitrary subsystem
/// dimensions (subsystem 0 most significant). The kept subsystems appear
/// in the order listed in `keep`.
pub fn partial_trace_dims(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.shape() != (total, total) {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, subsystem dims {:?} give {total}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() || seen[k] {
            return Err(Error::Argument(format!(
                "invalid subsystem index {k} for {} subsystems",
                dims.len()
            )));
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|&i| !seen[i]).collect();
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let mut offs = vec![0usize];
        for &s in subs {
            let mut next = Vec::with_capacity(offs.len() * dims[s]);
            for &o in &offs {
                for d in 0..dims[s] {
                    next.push(o + d * strides[s]);
                }
            }
            offs = next;
        }
        offs
    };
    let off_k = offsets(keep);
    let off_t = offsets(&traced);
    let n = m.cols();
    let data = m.data();
    Ok(ComplexMatrix::from_fn(off_k.len(), off_k.len(), |i, j| {
        off_t.iter().map(|&t| data[(off_k[i] + t) * n + off_k[j] + t]).sum()
    }))
}

/// Traces out every subsystem not listed in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims: Vec<usize> = rho.qubit_dims.iter().map(|&q| 1usize << q).collect();
    let m = partial_trace_dims(&rho.matrix, &dims, keep)?;
    Ok(DensityMatrix {
        matrix: m.hermitian_part(),
        qubit_dims: keep.iter().map(|&k| rho.qubit_dims[k]).collect(),
        normalized: rho.normalized,
    })
}

fn check_pair(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Argument(format!("dimension mismatch: {} vs {}", rho.dim(), sigma.dim())));
    }
    if !rho.normalized || !sigma.normalized {
        return Err(Error::Argument("distance measures need normalized states".into()));
    }
    Ok(())
}

/// `T(ρ, σ) = ½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok(trace_distance_matrices(&rho.matrix, &sigma.matrix).clamp(0.0, 1.0))
}

/// Half the trace norm of the difference, without normalization checks.
pub fn trace_distance_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = (a - b).hermitian_part();
    0.5 * eigvals_unchecked(&d).iter().map(|x| x.abs()).sum::<f64>()
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_pair(rho, sigma)?;
    Ok(fidelity_matrices(&rho.matrix, &sigma.matrix).clamp(0.0, 1.0))
}

pub fn fidelity_matrices(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let p = sqrt_psd(a).matmul(&sqrt_psd(b));
    svd(&p).s.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn plus() -> DensityMatrix {
        DensityMatrix::from_pure(&[c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)], vec![1]).unwrap()
    }

    #[test]
    fn trace_of_product_half() {
        let a = DensityMatrix::basis(1, 1);
        let b = plus();
        let ab = a.tensor(&b).unwrap();
        let back = partial_trace(&ab, &[0]).unwrap();
        assert!((back.matrix() - a.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let h = 0.5f64.sqrt();
        let bell = DensityMatrix::from_pure(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)], vec![1, 1])
            .unwrap();
        let m = partial_trace(&bell, &[1]).unwrap();
        assert!((m.matrix() - DensityMatrix::maximally_mixed(1).matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn full_trace_is_scalar() {
        let r = partial_trace(&plus(), &[]).unwrap();
        assert_eq!(r.dim(), 1);
        assert!((r.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_subsystem_index() {
        assert!(matches!(partial_trace(&plus(), &[3]), Err(Error::Argument(_))));
    }

    #[test]
    fn keep_order_permutes() {
        let a = DensityMatrix::basis(1, 1);
        let b = DensityMatrix::basis(1, 0);
        let ab = a.tensor(&b).unwrap();
        let ba = partial_trace(&ab, &[1, 0]).unwrap();
        assert_eq!(ba.matrix(), b.tensor(&a).unwrap().matrix());
    }

    #[test]
    fn distances_on_basis_states() {
        let z0 = DensityMatrix::basis(1, 0);
        let z1 = DensityMatrix::basis(1, 1);
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&z0, &z0).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&z0, &z1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_non_psd() {
        let m = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]);
        assert!(DensityMatrix::new(m, vec![1], true).is_err());
    }

    #[test]
    fn unnormalized_pair_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        let half = DensityMatrix::new(m, vec![1], false).unwrap();
        assert!(trace_distance(&half, &DensityMatrix::basis(1, 0)).is_err());
    }
}
