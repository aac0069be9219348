//! Shared helpers: seeded random instances and conversions to the oracle's
//! plain nested-vector matrices.

// Not every test binary uses every helper.
#![allow(dead_code)]

use wgcn_core::{DenseMatrix, Rng, SparseMatrix};
use wgcn_oracle::Mat;

pub fn random_sparse(rng: &mut Rng, rows: usize, cols: usize, density: f64) -> SparseMatrix {
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.uniform() < density {
                entries.push((r, c, rng.uniform_in(-1.0, 1.0)));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &entries).unwrap()
}

/// Symmetric matrix with non-negative entries, suitable for normalization.
pub fn random_symmetric_nonneg(rng: &mut Rng, n: usize, density: f64) -> SparseMatrix {
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.uniform() < density {
                let v = rng.uniform_in(0.05, 2.0);
                entries.push((i, j, v));
                if i != j {
                    entries.push((j, i, v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &entries).unwrap()
}

pub fn random_dense(rng: &mut Rng, rows: usize, cols: usize) -> DenseMatrix {
    let values = (0..rows * cols)
        .map(|_| rng.uniform_in(-1.0, 1.0))
        .collect();
    DenseMatrix::from_vec(rows, cols, values).unwrap()
}

/// Sparse non-negative matrix shaped like a document-word count block.
pub fn random_counts(rng: &mut Rng, rows: usize, cols: usize, density: f64) -> SparseMatrix {
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.uniform() < density {
                entries.push((r, c, (1.0 + rng.uniform() * 4.0).floor()));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &entries).unwrap()
}

pub fn sparse_to_mat(m: &SparseMatrix) -> Mat {
    let mut out = wgcn_oracle::matrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.iter_entries() {
        out[r][c] = v;
    }
    out
}

pub fn dense_to_mat(m: &DenseMatrix) -> Mat {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

pub fn mat_vs_sparse(a: &Mat, b: &SparseMatrix) -> f64 {
    wgcn_oracle::matrix::max_abs_diff(a, &sparse_to_mat(b))
}

pub fn mat_vs_dense(a: &Mat, b: &DenseMatrix) -> f64 {
    wgcn_oracle::matrix::max_abs_diff(a, &dense_to_mat(b))
}
