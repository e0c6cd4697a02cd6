// SPDX-License-Identifier: MIT OR Apache-2.0
//! Primal–dual interior-point solver (Nesterov–Todd scaling, Mehrotra
//! predictor–corrector) for the programs in [`super::program`].
//!
//! Complex Hermitian blocks are doubled into real symmetric ones via
//! `X ↦ [[Re X, −Im X], [Im X, Re X]]`, and the real problem is solved in
//! the standard form `min ⟨C, X⟩  s.t.  A(X) = b, X ⪰ 0` with `C = −objective`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::program::{Entry, SdpProgram};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};

type Mat = DMatrix<f64>;
type Vector = DVector<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on relative primal/dual infeasibility and relative gap.
    pub tol: f64,
    pub max_iterations: usize,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    /// Dual iterates beyond this norm with primal residual above `tol`
    /// are taken as evidence of infeasibility.
    pub divergence_bound: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-7, max_iterations: 200, step_fraction: 0.98, divergence_bound: 1e8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    /// Full-register matrices `P X P†`, one per block.
    pub blocks: Vec<ComplexMatrix>,
    /// Block variables in the program's own coordinates.
    pub variables: Vec<ComplexMatrix>,
    pub objective_value: f64,
    /// Objective of the dual iterate; an upper bound up to its residual.
    pub dual_value: f64,
    /// `dual_value − objective_value`.
    pub gap: f64,
    /// Euclidean norm of the constraint residual of `variables`.
    pub residual: f64,
    pub iterations: usize,
}

struct RTerm {
    con: usize,
    /// 0 is the identity frame.
    frame: usize,
    entries: Vec<(usize, usize, f64)>,
}

struct RBlock {
    n: usize,
    /// `frames[0]` is an unused placeholder for the identity frame.
    frames: Vec<Mat>,
    terms: Vec<RTerm>,
    c: Mat,
}

impl RBlock {
    fn frame_dim(&self, f: usize) -> usize {
        if f == 0 {
            self.n
        } else {
            self.frames[f].ncols()
        }
    }
}

struct RealProblem {
    blocks: Vec<RBlock>,
    b: Vector,
}

fn double(a: &ComplexMatrix) -> Mat {
    let (p, q) = a.shape();
    Mat::from_fn(2 * p, 2 * q, |r, col| {
        let z = a[(r % p, col % q)];
        match (r < p, col < q) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn double_entries(entries: &[Entry], k: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(entries.len() * 4);
    for &Entry(r, col, z) in entries {
        let (re, im) = (0.5 * z.re, 0.5 * z.im);
        if re != 0.0 {
            out.push((r, col, re));
            out.push((r + k, col + k, re));
        }
        if im != 0.0 {
            out.push((r, col + k, -im));
            out.push((r + k, col, im));
        }
    }
    out
}

fn to_real(p: &SdpProgram) -> RealProblem {
    let mut blocks: Vec<RBlock> = p
        .blocks
        .iter()
        .map(|b| RBlock { n: 2 * b.dim, frames: vec![Mat::zeros(0, 0)], terms: vec![], c: Mat::zeros(2 * b.dim, 2 * b.dim) })
        .collect();
    let mut local: Vec<Vec<Option<usize>>> = vec![vec![None; p.frames.len()]; p.blocks.len()];
    for (ci, con) in p.constraints.iter().enumerate() {
        for t in &con.terms {
            if p.blocks[t.block].dim == 0 {
                continue;
            }
            let blk = &mut blocks[t.block];
            let (frame, k) = match t.frame {
                None => (0, p.blocks[t.block].dim),
                Some(g) => {
                    let fr = &p.frames[g];
                    if fr.cols() == 0 {
                        continue;
                    }
                    let idx = *local[t.block][g].get_or_insert_with(|| {
                        blk.frames.push(double(fr));
                        blk.frames.len() - 1
                    });
                    (idx, fr.cols())
                }
            };
            let entries = double_entries(&t.entries, k);
            if !entries.is_empty() {
                blk.terms.push(RTerm { con: ci, frame, entries });
            }
        }
    }
    for o in &p.objective {
        if p.blocks[o.block].dim > 0 {
            blocks[o.block].c -= double(&o.matrix) * 0.5;
        }
    }
    let b = Vector::from_iterator(p.constraints.len(), p.constraints.iter().map(|c| c.rhs));
    RealProblem { blocks, b }
}

/// `A(X)`.
fn a_op(pr: &RealProblem, xs: &[Mat]) -> Vector {
    let mut v = Vector::zeros(pr.b.len());
    for (blk, x) in pr.blocks.iter().zip(xs) {
        if blk.n == 0 {
            continue;
        }
        let proj: Vec<Option<Mat>> =
            (0..blk.frames.len()).map(|f| (f > 0).then(|| blk.frames[f].transpose() * x * &blk.frames[f])).collect();
        for t in &blk.terms {
            let m = proj[t.frame].as_ref().unwrap_or(x);
            v[t.con] += t.entries.iter().map(|&(r, col, a)| a * m[(r, col)]).sum::<f64>();
        }
    }
    v
}

/// `Aᵀ(y)` per block.
fn at_op(pr: &RealProblem, y: &Vector) -> Vec<Mat> {
    pr.blocks
        .iter()
        .map(|blk| {
            let mut acc: Vec<Mat> = (0..blk.frames.len()).map(|f| Mat::zeros(blk.frame_dim(f), blk.frame_dim(f))).collect();
            for t in &blk.terms {
                let yi = y[t.con];
                if yi == 0.0 {
                    continue;
                }
                for &(r, col, a) in &t.entries {
                    acc[t.frame][(r, col)] += yi * a;
                }
            }
            let mut out = acc[0].clone();
            for f in 1..blk.frames.len() {
                out += &blk.frames[f] * &acc[f] * blk.frames[f].transpose();
            }
            out
        })
        .collect()
}

/// Schur complement `M_ij = ⟨A_i, W A_j W⟩`.
fn schur(pr: &RealProblem, ws: &[Mat]) -> Mat {
    let m = pr.b.len();
    let mut out = Mat::zeros(m, m);
    for (blk, w) in pr.blocks.iter().zip(ws) {
        if blk.n == 0 || blk.terms.is_empty() {
            continue;
        }
        let nf = blk.frames.len();
        // h[f][g] = G_fᵀ W G_g for f <= g, with G_0 = I.
        let wg: Vec<Mat> = (0..nf).map(|g| if g == 0 { w.clone() } else { w * &blk.frames[g] }).collect();
        let mut h: Vec<Vec<Option<Mat>>> = vec![vec![None; nf]; nf];
        for f in 0..nf {
            for g in f..nf {
                h[f][g] = Some(if f == 0 { wg[g].clone() } else { blk.frames[f].transpose() * &wg[g] });
            }
        }
        for (i1, t1) in blk.terms.iter().enumerate() {
            for t2 in &blk.terms[i1..] {
                let (f1, f2) = (t1.frame, t2.frame);
                let hm = h[f1.min(f2)][f1.max(f2)].as_ref().expect("filled above");
                let at = |a: usize, b: usize| if f1 <= f2 { hm[(a, b)] } else { hm[(b, a)] };
                let mut val = 0.0;
                for &(p, q, a) in &t1.entries {
                    for &(r, s, cc) in &t2.entries {
                        val += a * cc * at(q, r) * at(p, s);
                    }
                }
                if std::ptr::eq(t1, t2) {
                    out[(t1.con, t1.con)] += val;
                } else {
                    out[(t1.con, t2.con)] += val;
                    out[(t2.con, t1.con)] += val;
                }
            }
        }
    }
    out
}

/// Indices of a maximal well-conditioned subset of rows of a Gram matrix.
fn independent_rows(g: &Mat, rel_tol: f64) -> Vec<usize> {
    let m = g.nrows();
    let max_diag = (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return vec![];
    }
    let mut resid: Vec<f64> = (0..m).map(|i| g[(i, i)]).collect();
    let mut chosen = vec![false; m];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    loop {
        let best = (0..m).filter(|&i| !chosen[i]).max_by(|&a, &b| resid[a].total_cmp(&resid[b]));
        let Some(piv) = best else { break };
        if resid[piv] <= rel_tol * max_diag {
            break;
        }
        let root = resid[piv].sqrt();
        let col: Vec<f64> = (0..m)
            .map(|j| {
                let s: f64 = cols.iter().map(|cl| cl[j] * cl[piv]).sum();
                (g[(j, piv)] - s) / root
            })
            .collect();
        for j in 0..m {
            resid[j] -= col[j] * col[j];
        }
        chosen[piv] = true;
        kept.push(piv);
        cols.push(col);
    }
    kept.sort_unstable();
    kept
}

/// Drops linearly dependent constraints after checking their right-hand
/// sides agree with the kept ones.
fn remove_dependent(pr: RealProblem) -> Result<RealProblem> {
    let m = pr.b.len();
    if m == 0 {
        return Ok(pr);
    }
    let ident: Vec<Mat> = pr.blocks.iter().map(|b| Mat::identity(b.n, b.n)).collect();
    let g = schur(&pr, &ident);
    let kept = independent_rows(&g, 1e-12);
    if kept.len() == m {
        return Ok(pr);
    }
    let gkk = Mat::from_fn(kept.len(), kept.len(), |a, b| g[(kept[a], kept[b])]);
    let chol = Cholesky::new(gkk).ok_or_else(|| Error::Infeasible("constraint Gram matrix is singular".into()))?;
    let bk = Vector::from_iterator(kept.len(), kept.iter().map(|&i| pr.b[i]));
    let scale = 1.0 + pr.b.amax();
    let mut is_kept = vec![false; m];
    for &i in &kept {
        is_kept[i] = true;
    }
    for i in (0..m).filter(|&i| !is_kept[i]) {
        let gi = Vector::from_iterator(kept.len(), kept.iter().map(|&k| g[(k, i)]));
        let coef = chol.solve(&gi);
        let implied = coef.dot(&bk);
        if (implied - pr.b[i]).abs() > 1e-7 * scale {
            return Err(Error::Infeasible(format!(
                "constraint {i} is a combination of others but its right-hand side differs by {:.3e}",
                (implied - pr.b[i]).abs()
            )));
        }
    }
    let mut remap = vec![usize::MAX; m];
    for (new, &old) in kept.iter().enumerate() {
        remap[old] = new;
    }
    let blocks = pr
        .blocks
        .into_iter()
        .map(|mut blk| {
            blk.terms.retain(|t| is_kept[t.con]);
            for t in &mut blk.terms {
                t.con = remap[t.con];
            }
            blk
        })
        .collect();
    Ok(RealProblem { blocks, b: bk })
}

struct Scaling {
    g: Mat,
    w: Mat,
    d: Vec<f64>,
}

fn nt_scaling(x: &Mat, z: &Mat) -> Option<Scaling> {
    let l = Cholesky::new(x.clone())?.l();
    let s = l.transpose() * z * &l;
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return None;
    }
    let n = x.nrows();
    let q = eig.eigenvectors;
    let scale = Mat::from_fn(n, n, |r, col| if r == col { eig.eigenvalues[r].powf(-0.25) } else { 0.0 });
    let g = l * q * scale;
    let w = &g * g.transpose();
    let d = eig.eigenvalues.iter().map(|v| v.sqrt()).collect();
    Some(Scaling { g, w, d })
}

/// Largest `α` with `D + α Δ ⪰ 0` (infinite if none binds).
fn max_step(d: &[f64], delta: &Mat) -> f64 {
    let n = d.len();
    let t = Mat::from_fn(n, n, |r, col| delta[(r, col)] / (d[r] * d[col]).sqrt());
    let t = (&t + t.transpose()) * 0.5;
    let lmin = t.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn frob_inner(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn factor_schur(m: &Mat) -> Option<Cholesky<f64, Dyn>> {
    if let Some(ch) = Cholesky::new(m.clone()) {
        return Some(ch);
    }
    let scale = (0..m.nrows()).map(|i| m[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let mut reg = 1e-14 * scale;
    while reg < 1e-6 * scale {
        let mut mm = m.clone();
        for i in 0..mm.nrows() {
            mm[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(mm) {
            return Some(ch);
        }
        reg *= 100.0;
    }
    None
}

struct Direction {
    dx: Vec<Mat>,
    dy: Vector,
    dz: Vec<Mat>,
    dxh: Vec<Mat>,
    dzh: Vec<Mat>,
}

fn direction(
    pr: &RealProblem,
    chol: &Cholesky<f64, Dyn>,
    sc: &[Option<Scaling>],
    rp: &Vector,
    rd: &[Mat],
    rhat: &[Mat],
) -> Direction {
    let nb = pr.blocks.len();
    let rc: Vec<Mat> = (0..nb)
        .map(|b| match &sc[b] {
            Some(s) => &s.g * &rhat[b] * s.g.transpose(),
            None => Mat::zeros(0, 0),
        })
        .collect();
    let tmp: Vec<Mat> = (0..nb)
        .map(|b| match &sc[b] {
            Some(s) => &rc[b] - &s.w * &rd[b] * &s.w,
            None => Mat::zeros(0, 0),
        })
        .collect();
    let rhs = rp - a_op(pr, &tmp);
    let dy = chol.solve(&rhs);
    let aty = at_op(pr, &dy);
    let mut dx = Vec::with_capacity(nb);
    let mut dz = Vec::with_capacity(nb);
    let mut dxh = Vec::with_capacity(nb);
    let mut dzh = Vec::with_capacity(nb);
    for b in 0..nb {
        match &sc[b] {
            Some(s) => {
                let z = &rd[b] - &aty[b];
                let x = &rc[b] - &s.w * &z * &s.w;
                let x = (&x + x.transpose()) * 0.5;
                let zh = s.g.transpose() * &z * &s.g;
                let zh = (&zh + zh.transpose()) * 0.5;
                dxh.push(&rhat[b] - &zh);
                dzh.push(zh);
                dx.push(x);
                dz.push(z);
            }
            None => {
                for v in [&mut dx, &mut dz, &mut dxh, &mut dzh] {
                    v.push(Mat::zeros(0, 0));
                }
            }
        }
    }
    Direction { dx, dy, dz, dxh, dzh }
}

fn step_lengths(sc: &[Option<Scaling>], dir: &Direction, frac: f64) -> (f64, f64) {
    let mut ap = f64::INFINITY;
    let mut ad = f64::INFINITY;
    for (b, s) in sc.iter().enumerate() {
        if let Some(s) = s {
            ap = ap.min(max_step(&s.d, &dir.dxh[b]));
            ad = ad.min(max_step(&s.d, &dir.dzh[b]));
        }
    }
    ((frac * ap).min(1.0), (frac * ad).min(1.0))
}

pub fn solve(program: &SdpProgram, tol: f64) -> Result<SdpSolution> {
    solve_with(program, &SolverConfig { tol, ..SolverConfig::default() })
}

pub fn solve_with(program: &SdpProgram, cfg: &SolverConfig) -> Result<SdpSolution> {
    program.validate()?;
    if !(cfg.tol > 0.0) {
        return Err(Error::Argument("solver tolerance must be positive".into()));
    }
    let pr = remove_dependent(to_real(program))?;
    let nb = pr.blocks.len();
    let m = pr.b.len();
    let total_n: usize = pr.blocks.iter().map(|b| b.n).sum();

    // Infeasible-start point in the style of SDPT3.
    let ident: Vec<Mat> = pr.blocks.iter().map(|b| Mat::identity(b.n, b.n)).collect();
    let gram = schur(&pr, &ident);
    let anorm: Vec<f64> = (0..m).map(|i| gram[(i, i)].max(0.0).sqrt()).collect();
    let mut xs = Vec::with_capacity(nb);
    let mut zs = Vec::with_capacity(nb);
    for blk in &pr.blocks {
        let n = blk.n as f64;
        let mut xi = 10f64.max(n.sqrt());
        let mut eta = 10f64.max(n.sqrt()).max(blk.c.norm());
        for t in &blk.terms {
            xi = xi.max(n * (1.0 + pr.b[t.con].abs()) / (1.0 + anorm[t.con]));
            eta = eta.max(anorm[t.con]);
        }
        xs.push(Mat::identity(blk.n, blk.n) * xi);
        zs.push(Mat::identity(blk.n, blk.n) * eta);
    }
    let mut y = Vector::zeros(m);
    let bnorm = pr.b.norm();
    let cnorm = pr.blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();

    let finish = |xs: &[Mat], y: &Vector, iterations: usize| -> SdpSolution {
        let variables: Vec<ComplexMatrix> = program
            .blocks
            .iter()
            .zip(xs)
            .map(|(info, x)| {
                let d = info.dim;
                ComplexMatrix::from_fn(d, d, |r, col| {
                    c(
                        0.5 * (x[(r, col)] + x[(r + d, col + d)]),
                        0.5 * (x[(r + d, col)] - x[(r, col + d)]),
                    )
                })
            })
            .collect();
        let blocks = variables.iter().enumerate().map(|(b, x)| program.embed(b, x)).collect();
        let objective_value = program.objective_value(&variables);
        let dual_value = program.objective_constant - pr.b.dot(y);
        SdpSolution {
            blocks,
            residual: program.residual_norm(&variables),
            variables,
            objective_value,
            dual_value,
            gap: dual_value - objective_value,
            iterations,
        }
    };

    if total_n == 0 {
        return Ok(finish(&xs, &y, 0));
    }

    let mut last = (f64::INFINITY, f64::INFINITY);
    for iter in 0..cfg.max_iterations {
        let ax = a_op(&pr, &xs);
        let rp = &pr.b - ax;
        let aty = at_op(&pr, &y);
        let rd: Vec<Mat> = (0..nb).map(|b| &pr.blocks[b].c - &zs[b] - &aty[b]).collect();
        let pobj: f64 = (0..nb).map(|b| frob_inner(&pr.blocks[b].c, &xs[b])).sum();
        let dobj = pr.b.dot(&y);
        let xz: f64 = (0..nb).map(|b| frob_inner(&xs[b], &zs[b])).sum();
        let mu = xz / total_n as f64;
        let relp = rp.norm() / (1.0 + bnorm);
        let rdn = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt();
        let reld = rdn / (1.0 + cnorm);
        let denom = 1.0 + pobj.abs() + dobj.abs();
        let relgap = (xz.abs().max((pobj - dobj).abs())) / denom;
        last = (rp.norm(), pobj - dobj);
        if relp <= cfg.tol && rp.norm() <= cfg.tol && reld <= cfg.tol && relgap <= cfg.tol {
            return Ok(finish(&xs, &y, iter));
        }
        if y.amax() > cfg.divergence_bound && relp > cfg.tol {
            return Err(Error::Infeasible(format!(
                "dual iterate diverged (|y| = {:.3e}) with primal residual {:.3e}",
                y.amax(),
                rp.norm()
            )));
        }

        let sc: Vec<Option<Scaling>> = (0..nb)
            .map(|b| if pr.blocks[b].n == 0 { None } else { nt_scaling(&xs[b], &zs[b]) })
            .collect();
        if (0..nb).any(|b| pr.blocks[b].n > 0 && sc[b].is_none()) {
            break;
        }
        let ws: Vec<Mat> = sc.iter().map(|s| s.as_ref().map_or(Mat::zeros(0, 0), |s| s.w.clone())).collect();
        let Some(chol) = factor_schur(&schur(&pr, &ws)) else { break };

        // Predictor.
        let rhat: Vec<Mat> = sc
            .iter()
            .map(|s| match s {
                Some(s) => Mat::from_diagonal(&DVector::from_iterator(s.d.len(), s.d.iter().map(|v| -v))),
                None => Mat::zeros(0, 0),
            })
            .collect();
        let aff = direction(&pr, &chol, &sc, &rp, &rd, &rhat);
        let (ap, ad) = step_lengths(&sc, &aff, cfg.step_fraction);
        let xz_aff: f64 = (0..nb)
            .map(|b| frob_inner(&(&xs[b] + &aff.dx[b] * ap), &(&zs[b] + &aff.dz[b] * ad)))
            .sum();
        let sigma = ((xz_aff / total_n as f64) / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rhat: Vec<Mat> = (0..nb)
            .map(|b| match &sc[b] {
                Some(s) => {
                    let n = s.d.len();
                    let cross = &aff.dxh[b] * &aff.dzh[b];
                    Mat::from_fn(n, n, |r, col| {
                        let mut v = -(cross[(r, col)] + cross[(col, r)]);
                        if r == col {
                            v += 2.0 * sigma * mu - 2.0 * s.d[r] * s.d[r];
                        }
                        v / (s.d[r] + s.d[col])
                    })
                }
                None => Mat::zeros(0, 0),
            })
            .collect();
        let dir = direction(&pr, &chol, &sc, &rp, &rd, &rhat);
        let (ap, ad) = step_lengths(&sc, &dir, cfg.step_fraction);
        for b in 0..nb {
            if pr.blocks[b].n == 0 {
                continue;
            }
            xs[b] += &dir.dx[b] * ap;
            zs[b] += &dir.dz[b] * ad;
            xs[b] = (&xs[b] + xs[b].transpose()) * 0.5;
            zs[b] = (&zs[b] + zs[b].transpose()) * 0.5;
        }
        y += &dir.dy * ad;
    }
    let best = finish(&xs, &y, cfg.max_iterations);
    Err(Error::Convergence { iterations: cfg.max_iterations, primal_residual: last.0, gap: last.1, best: Box::new(best) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::sdp::program::{BlockInfo, Constraint, ObjectiveTerm, Term};

    fn block(dim: usize) -> BlockInfo {
        BlockInfo { name: "x".into(), dim, embedding: None, qubit_dims: vec![] }
    }

    fn trace_one(dim: usize) -> Constraint {
        Constraint {
            terms: vec![Term {
                block: 0,
                frame: None,
                entries: (0..dim).map(|i| Entry(i, i, C64::new(1.0, 0.0))).collect(),
            }],
            rhs: 1.0,
            label: "trace".into(),
        }
    }

    #[test]
    fn rank_one_projector_over_states() {
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let proj = ComplexMatrix::outer(&v, &v);
        let p = SdpProgram {
            blocks: vec![block(2)],
            frames: vec![],
            objective: vec![ObjectiveTerm { block: 0, matrix: proj }],
            objective_constant: 0.0,
            constraints: vec![trace_one(2)],
        };
        let s = solve(&p, 1e-9).unwrap();
        assert!((s.objective_value - 1.0).abs() < 1e-7, "{}", s.objective_value);
        assert!(s.gap.abs() < 1e-7);
    }

    #[test]
    fn scalar_equality() {
        let p = SdpProgram {
            blocks: vec![block(1)],
            frames: vec![],
            objective: vec![ObjectiveTerm { block: 0, matrix: ComplexMatrix::identity(1) }],
            objective_constant: 0.0,
            constraints: vec![Constraint {
                terms: vec![Term { block: 0, frame: None, entries: vec![Entry(0, 0, C64::new(1.0, 0.0))] }],
                rhs: 0.5,
                label: String::new(),
            }],
        };
        let s = solve(&p, 1e-9).unwrap();
        assert!((s.objective_value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn inconsistent_duplicates_are_infeasible() {
        let mut second = trace_one(2);
        second.rhs = 2.0;
        let p = SdpProgram {
            blocks: vec![block(2)],
            frames: vec![],
            objective: vec![],
            objective_constant: 0.0,
            constraints: vec![trace_one(2), second],
        };
        assert!(matches!(solve(&p, 1e-8), Err(Error::Infeasible(_))));
    }

    #[test]
    fn negative_trace_is_infeasible() {
        let mut con = trace_one(2);
        con.rhs = -1.0;
        let p = SdpProgram {
            blocks: vec![block(2)],
            frames: vec![],
            objective: vec![ObjectiveTerm { block: 0, matrix: ComplexMatrix::identity(2) }],
            objective_constant: 0.0,
            constraints: vec![con],
        };
        assert!(matches!(solve(&p, 1e-8), Err(Error::Infeasible(_)) | Err(Error::Convergence { .. })));
    }
}
