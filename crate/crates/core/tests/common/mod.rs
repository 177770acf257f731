//! Floating-point oracles, independent of the exact linear algebra under test.
#![allow(dead_code)]

use nalgebra::DMatrix;

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > 1e-9 * top.max(1.0)).count()
}

/// Orthonormal basis of the column span.
pub fn orth(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 1e-9 * top.max(1.0)).collect();
    DMatrix::from_fn(n, keep.len(), |i, j| u[(i, keep[j])])
}

/// Projector onto the orthogonal complement of a subspace with orthonormal basis `q`.
pub fn complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::identity(q.nrows(), q.nrows()) - q * q.transpose()
}

/// An algebra by dense structure constants: `mul[i][j]` is the product of basis elements.
pub struct DenseAlgebra {
    pub dim: usize,
    pub mul: Vec<Vec<Vec<f64>>>,
}

impl DenseAlgebra {
    /// Commutative monomials in `k` variables of total degree below `n`.
    pub fn truncated_polynomials(k: usize, n: usize) -> (Self, Vec<Vec<usize>>) {
        let mut monos: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![vec![]];
        while let Some(m) = stack.pop() {
            if m.len() == k {
                if m.iter().sum::<usize>() < n {
                    monos.push(m);
                }
                continue;
            }
            for e in 0..n {
                let mut next = m.clone();
                next.push(e);
                stack.push(next);
            }
        }
        monos.sort_by_key(|m| (m.iter().sum::<usize>(), std::cmp::Reverse(m.clone())));
        let dim = monos.len();
        let mul = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .map(|b| {
                        let s: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        let mut v = vec![0.0; dim];
                        if let Some(i) = monos.iter().position(|m| *m == s) {
                            v[i] = 1.0;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        (DenseAlgebra { dim, mul }, monos)
    }

    pub fn product(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let c = u[i] * v[j];
                if c != 0.0 {
                    for k in 0..self.dim {
                        out[k] += c * self.mul[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// Orthonormal basis of the two-sided ideal generated by `gens`.
    pub fn ideal(&self, gens: &[Vec<f64>]) -> DMatrix<f64> {
        let e = |i: usize| {
            let mut v = vec![0.0; self.dim];
            v[i] = 1.0;
            v
        };
        let mut vecs: Vec<Vec<f64>> = Vec::new();
        for g in gens {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    vecs.push(self.product(&self.product(&e(i), g), &e(j)));
                }
            }
        }
        let m = DMatrix::from_fn(self.dim, vecs.len(), |i, j| vecs[j][i]);
        orth(&m)
    }

    /// `(dim of compatible tuples, dim of the image of the algebra)` for a family of ideals.
    pub fn completion_dims(&self, ideals: &[DMatrix<f64>]) -> (usize, usize) {
        let (n, m) = (self.dim, ideals.len());
        let mut blocks = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let mut both = ideals[i].clone().resize_horizontally(ideals[i].ncols() + ideals[j].ncols(), 0.0);
                both.columns_mut(ideals[i].ncols(), ideals[j].ncols()).copy_from(&ideals[j]);
                let p = complement(&orth(&both));
                let mut row = DMatrix::zeros(n, n * m);
                row.columns_mut(i * n, n).copy_from(&p);
                row.columns_mut(j * n, n).copy_from(&(-&p));
                blocks.push(row);
            }
        }
        let c = stack(&blocks, n * m);
        let tuples = n * m - rank(&c);
        let space = tuples - ideals.iter().map(|j| j.ncols()).sum::<usize>();
        let projs: Vec<DMatrix<f64>> = ideals.iter().map(complement).collect();
        let intersection = n - rank(&stack(&projs, n));
        (space, n - intersection)
    }
}

pub fn stack(blocks: &[DMatrix<f64>], cols: usize) -> DMatrix<f64> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.rows_mut(r, b.nrows()).copy_from(b);
        r += b.nrows();
    }
    out
}
