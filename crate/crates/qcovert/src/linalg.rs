//! Dense complex linear algebra helpers with block detection.
//!
//! Most states in this crate conserve some photon-number combination, so
//! Hermitian matrices split into many small decoupled blocks. Every
//! spectral routine here first finds the connected components of the
//! nonzero pattern and diagonalizes each block separately.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest |A - A†| entry.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * c(0.5)
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().sum()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
    fn groups(mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if label[r] == usize::MAX {
                label[r] = out.len();
                out.push(Vec::new());
            }
            out[label[r]].push(i);
        }
        out
    }
}

/// Connected components of the union of the nonzero patterns.
pub fn components(mats: &[&CMat]) -> Vec<Vec<usize>> {
    let n = mats[0].nrows();
    let mut uf = UnionFind::new(n);
    for m in mats {
        for j in 0..n {
            for i in 0..j {
                if m[(i, j)] != ZERO || m[(j, i)] != ZERO {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.groups()
}

/// Components from a sparse entry list over `n` indices.
pub fn sparse_components(n: usize, entries: &[(usize, usize, C64)]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for &(i, j, v) in entries {
        if v != ZERO {
            uf.union(i, j);
        }
    }
    uf.groups()
}

pub fn submatrix(a: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

/// One diagonal block of a Hermitian matrix with its eigenpairs.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Eigendecomposition of a Hermitian matrix organised by blocks.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub dim: usize,
    pub blocks: Vec<EigenBlock>,
}

/// Entries this far below the largest one are dropped before diagonalising;
/// the QR sweeps break down on entries spanning hundreds of decades.
const EIG_FLUSH: f64 = 1e-60;

fn eig_dense(mut a: CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 1 {
        return (vec![a[(0, 0)].re], CMat::from_element(1, 1, ONE));
    }
    let cut = EIG_FLUSH * a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.apply(|z| {
        if z.norm() < cut {
            *z = ZERO;
        }
    });
    let e = nalgebra::SymmetricEigen::new(a);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

impl Spectrum {
    pub fn of(a: &CMat) -> Spectrum {
        let comps = components(&[a]);
        Self::with_components(a, &comps)
    }

    pub fn with_components(a: &CMat, comps: &[Vec<usize>]) -> Spectrum {
        let blocks = comps
            .iter()
            .map(|idx| {
                let (values, vectors) = eig_dense(submatrix(a, idx));
                EigenBlock { indices: idx.clone(), values, vectors }
            })
            .collect();
        Spectrum { dim: a.nrows(), blocks }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Full eigenvector matrix, columns ordered like `eigenvalues()`.
    pub fn full_vectors(&self) -> CMat {
        let mut u = CMat::zeros(self.dim, self.dim);
        let mut col = 0;
        for b in &self.blocks {
            for k in 0..b.values.len() {
                for (r, &row) in b.indices.iter().enumerate() {
                    u[(row, col)] = b.vectors[(r, k)];
                }
                col += 1;
            }
        }
        u
    }

    /// f(A) = Σ f(λ) |v⟩⟨v|.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let fv: Vec<C64> = b.values.iter().map(|&x| f(x)).collect();
            let m = b.indices.len();
            for j in 0..m {
                for i in 0..m {
                    let mut acc = ZERO;
                    for k in 0..m {
                        acc += b.vectors[(i, k)] * fv[k] * b.vectors[(j, k)].conj();
                    }
                    out[(b.indices[i], b.indices[j])] = acc;
                }
            }
        }
        out
    }
}

pub fn check_hermitian(a: &CMat, tol: f64) -> Result<()> {
    let d = hermiticity_defect(a);
    if d > tol {
        return Err(Error::NonHermitian(d));
    }
    Ok(())
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(a: &CMat) -> f64 {
    Spectrum::of(a).eigenvalues().iter().map(|x| x.abs()).sum()
}

/// exp(G) for anti-Hermitian G given by sparse entries on `n` indices;
/// returns the sparse entries of the unitary.
pub fn expm_antihermitian_sparse(n: usize, gen: &[(usize, usize, C64)]) -> Vec<(usize, usize, C64)> {
    let comps = sparse_components(n, gen);
    let mut pos = vec![(0usize, 0usize); n];
    for (ci, idx) in comps.iter().enumerate() {
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = (ci, k);
        }
    }
    let mut blocks: Vec<CMat> = comps.iter().map(|idx| CMat::zeros(idx.len(), idx.len())).collect();
    for &(i, j, v) in gen {
        let (ci, a) = pos[i];
        let (_, b) = pos[j];
        // H = iG is Hermitian
        blocks[ci][(a, b)] += I * v;
    }
    let mut out = Vec::new();
    for (idx, h) in comps.iter().zip(blocks) {
        let m = idx.len();
        if m == 1 {
            let u = (-I * h[(0, 0)]).exp();
            out.push((idx[0], idx[0], u));
            continue;
        }
        let h = hermitize(&h);
        let (vals, vecs) = eig_dense(h);
        let ph: Vec<C64> = vals.iter().map(|&x| (-I * x).exp()).collect();
        for j in 0..m {
            for i in 0..m {
                let mut acc = ZERO;
                for k in 0..m {
                    acc += vecs[(i, k)] * ph[k] * vecs[(j, k)].conj();
                }
                if acc.norm() > 1e-300 {
                    out.push((idx[i], idx[j], acc));
                }
            }
        }
    }
    out
}

/// Dense exp(G) for anti-Hermitian G.
pub fn expm_antihermitian(g: &CMat) -> CMat {
    let n = g.nrows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if g[(i, j)] != ZERO {
                entries.push((i, j, g[(i, j)]));
            }
        }
    }
    let mut u = CMat::zeros(n, n);
    for (i, j, v) in expm_antihermitian_sparse(n, &entries) {
        u[(i, j)] = v;
    }
    u
}

/// Golden-section minimisation on [a, b].
pub fn golden_section(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() < tol {
            let x = 0.5 * (a + b);
            let fx = f(x);
            return Ok((x, fx));
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::Convergence("objective not finite".into()));
        }
    }
    Err(Error::Convergence("golden-section search exhausted".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_spectrum_matches_dense() {
        let mut a = CMat::zeros(4, 4);
        a[(0, 0)] = c(1.0);
        a[(2, 2)] = c(3.0);
        a[(0, 2)] = C64::new(0.5, 0.25);
        a[(2, 0)] = C64::new(0.5, -0.25);
        a[(1, 1)] = c(-2.0);
        a[(3, 3)] = c(0.1);
        let s = Spectrum::of(&a);
        assert_eq!(s.blocks.len(), 3);
        let mut ev = s.eigenvalues();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let dense = nalgebra::SymmetricEigen::new(a.clone());
        let mut dv: Vec<f64> = dense.eigenvalues.iter().copied().collect();
        dv.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in ev.iter().zip(&dv) {
            assert!((x - y).abs() < 1e-12);
        }
        let back = s.map(c);
        assert!((back - a).norm() < 1e-12);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 0.7;
        let mut g = CMat::zeros(2, 2);
        g[(0, 1)] = c(-t);
        g[(1, 0)] = c(t);
        let u = expm_antihermitian(&g);
        assert!((u[(0, 0)].re - t.cos()).abs() < 1e-13);
        assert!((u[(1, 0)].re - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }
}
