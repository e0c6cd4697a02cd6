// SPDX-License-Identifier: MIT OR Apache-2.0
//! Random unitaries and states for tests, oracles and generators.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, ComplexMatrix, DensityMatrix, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng).to_nalgebra();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    ComplexMatrix::from_fn(dim, dim, |row, col| {
        let d = r[(col, col)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        q[(row, col)] * phase
    })
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random density matrix of the given rank on `qubits` qubits (induced
/// measure from a Ginibre factor).
pub fn random_density<R: Rng + ?Sized>(qubits: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << qubits;
    let g = ginibre(dim, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::from_clipped(&m.scale_real(1.0 / tr), vec![qubits], true)
        .expect("Ginibre product has positive trace")
}
