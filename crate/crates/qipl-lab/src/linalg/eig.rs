// SPDX-License-Identifier: MIT OR Apache-2.0
//! Factorizations backed by nalgebra.

use nalgebra::DMatrix;

use super::{ComplexMatrix, C64, STRUCT_TOL};
use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix. `vectors` holds eigenvectors
/// as columns, in the same order as `values` (descending).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `Q diag(f(λ)) Q†`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |r, col| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += q[(r, k)] * q[(col, k)].conj() * fv[k];
                }
            }
            acc
        })
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Argument(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
    }
    if !m.is_hermitian(STRUCT_TOL) {
        return Err(Error::Argument(format!(
            "matrix is not Hermitian (deviation {:.3e})",
            m.hermiticity_error()
        )));
    }
    Ok(())
}

/// Eigenvalues sorted descending with matching eigenvectors.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    Ok(eig_unchecked(&m.hermitian_part()))
}

pub(crate) fn eig_unchecked(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.rows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: ComplexMatrix::zeros(0, 0) };
    }
    let se = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, col| se.eigenvectors[(r, order[col])]);
    HermitianEigen { values, vectors }
}

pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    Ok(eigvals_unchecked(&m.hermitian_part()))
}

pub(crate) fn eigvals_unchecked(h: &ComplexMatrix) -> Vec<f64> {
    if h.rows() == 0 {
        return vec![];
    }
    let mut v: Vec<f64> = h.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Square root of a PSD matrix. Eigenvalues at the rounding-noise level
/// (and negative ones) are set to zero first; otherwise a pure state's
/// noise eigenvalues near 1e-17 would turn into 1e-9 errors after the root.
pub fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let e = eig_unchecked(&m.hermitian_part());
    let top = e.values.first().copied().unwrap_or(0.0).max(0.0);
    let floor = 8.0 * f64::EPSILON * (e.values.len() as f64) * top;
    e.map_values(|x| if x > floor { x.sqrt() } else { 0.0 })
}

/// Thin singular value decomposition `m = u · diag(s) · v_adj`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v_adj: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let d: DMatrix<C64> = m.to_nalgebra();
    let svd = d.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    Svd {
        u: ComplexMatrix::from_nalgebra(u),
        s: svd.singular_values.iter().copied().collect(),
        v_adj: ComplexMatrix::from_nalgebra(vt),
    }
}

/// Unitary factor of the polar decomposition of a square matrix, i.e. the
/// unitary `U` maximizing `Re Tr(U† m)`.
pub fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square(), "polar_unitary needs a square matrix");
    if m.rows() == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let Svd { u, v_adj, .. } = svd(m);
    u.matmul(&v_adj)
}

/// Orthonormal basis (as columns) of the span of eigenvectors of a PSD
/// matrix whose eigenvalues exceed `rel_tol · max(λ_max, 1e-300)`.
pub fn support_basis(m: &ComplexMatrix, rel_tol: f64) -> ComplexMatrix {
    let e = eig_unchecked(&m.hermitian_part());
    let top = e.values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return ComplexMatrix::zeros(m.rows(), 0);
    }
    let keep: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > rel_tol * top).collect();
    e.vectors.select_columns(&keep)
}

/// Eigenvalue spectrum clipped to be non-negative, rebuilt as a matrix.
pub fn clip_psd(m: &ComplexMatrix) -> ComplexMatrix {
    eig_unchecked(&m.hermitian_part()).map_values(|x| x.max(0.0))
}
