//! CSR sparse matrices and the kernels the rest of the crate is built on:
//! sparse-dense product, sparse-sparse product, symmetric normalization,
//! and integer matrix powers.
//!
//! All matrices are immutable after construction and every operation is a
//! pure function of its inputs, so values can be shared freely across
//! threads. Kernels run single-threaded; results are bitwise-deterministic
//! for fixed inputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fmath;

/// Entries with magnitude below this are dropped after sparse-sparse
/// products; cancellation noise sits far below any PMI or count scale.
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Inputs to [`normalize_symmetric`] may deviate from exact symmetry by at
/// most this much.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Sparse real matrix in canonical CSR form.
///
/// Canonical means: `row_offsets` is non-decreasing with `row_offsets[0] == 0`
/// and `row_offsets[rows] == nnz`; column indices within each row are strictly
/// increasing and below `cols`; no explicit zeros are stored. Every
/// constructor and kernel in this module preserves these invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Matrix with no stored entries.
    pub fn empty(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_offsets: vec![0; rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Build from (row, col, value) triplets. Duplicate coordinates are
    /// summed; entries that are (or sum to) zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for &(r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::InvalidArgument(alloc::format!(
                    "triplet ({r}, {c}) out of bounds for {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "non-finite value at ({r}, {c})"
                )));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (r, c, mut v) = sorted[i];
            i += 1;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                v += sorted[i].2;
                i += 1;
            }
            if v != 0.0 {
                row_offsets[r + 1] += 1;
                col_indices.push(c);
                values.push(v);
            }
        }
        for r in 0..rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Reassemble from raw CSR arrays, validating canonical form. Intended
    /// for deserialization.
    pub fn from_raw_parts(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let fail = |msg: &str| Err(Error::InvalidArgument(alloc::format!("CSR: {msg}")));
        if row_offsets.len() != rows + 1 {
            return fail("row_offsets length must be rows + 1");
        }
        if row_offsets[0] != 0 || row_offsets[rows] != values.len() {
            return fail("row_offsets must start at 0 and end at nnz");
        }
        if col_indices.len() != values.len() {
            return fail("col_indices and values lengths differ");
        }
        for r in 0..rows {
            let (lo, hi) = (row_offsets[r], row_offsets[r + 1]);
            if lo > hi {
                return fail("row_offsets must be non-decreasing");
            }
            for k in lo..hi {
                if col_indices[k] >= cols {
                    return fail("column index out of bounds");
                }
                if k > lo && col_indices[k] <= col_indices[k - 1] {
                    return fail("column indices must be strictly increasing within a row");
                }
            }
        }
        for &v in &values {
            if !v.is_finite() {
                return fail("values must be finite");
            }
            if v == 0.0 {
                return fail("explicit zeros are not stored");
            }
        }
        Ok(SparseMatrix {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of one row.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[r], self.row_offsets[r + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterate stored entries in row-major order.
    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Transpose via counting sort; output is canonical CSR.
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let row_offsets = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = counts;
        for (r, c, v) in self.iter_entries() {
            let slot = next[c];
            col_indices[slot] = r;
            values[slot] = v;
            next[c] += 1;
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Add 1.0 to every diagonal entry, materializing missing ones (A + I).
    pub fn plus_identity(&self) -> Result<SparseMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut entries: Vec<(usize, usize, f64)> = self.iter_entries().collect();
        entries.extend((0..self.rows).map(|i| (i, i, 1.0)));
        SparseMatrix::from_triplets(self.rows, self.cols, &entries)
    }

    /// Exactly symmetric mean (A + A^T) / 2. For an already symmetric input
    /// this reproduces the input bit-for-bit.
    pub fn symmetrize_average(&self) -> Result<SparseMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * self.nnz());
        for (r, c, v) in self.iter_entries() {
            entries.push((r, c, 0.5 * v));
            entries.push((c, r, 0.5 * v));
        }
        SparseMatrix::from_triplets(self.rows, self.cols, &entries)
    }

    /// Largest |A - A^T| over all coordinates.
    pub fn max_asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            let (ac, av) = self.row(r);
            let (bc, bv) = t.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() || j < bc.len() {
                let diff = if j >= bc.len() || (i < ac.len() && ac[i] < bc[j]) {
                    i += 1;
                    av[i - 1].abs()
                } else if i >= ac.len() || bc[j] < ac[i] {
                    j += 1;
                    bv[j - 1].abs()
                } else {
                    i += 1;
                    j += 1;
                    (av[i - 1] - bv[j - 1]).abs()
                };
                worst = worst.max(diff);
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter_entries() {
            out.set(r, c, v);
        }
        out
    }
}

/// Sparse-dense product `a * b`.
pub fn spmm(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols != b.rows() {
        return Err(Error::DimensionMismatch {
            op: "spmm",
            left: (a.rows, a.cols),
            right: (b.rows(), b.cols()),
        });
    }
    let n = b.cols();
    let mut out = DenseMatrix::zeros(a.rows, n);
    for r in 0..a.rows {
        let (cols, vals) = a.row(r);
        let out_row = out.row_mut(r);
        for (&k, &v) in cols.iter().zip(vals) {
            let b_row = b.row(k);
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += v * bv;
            }
        }
    }
    Ok(out)
}

/// Sparse-sparse product `a * b` in canonical CSR form.
///
/// Row-wise accumulation into a dense scratch buffer; result entries with
/// magnitude below [`DROP_TOLERANCE`] are removed.
pub fn sp_sp_mm(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch {
            op: "sp_sp_mm",
            left: (a.rows, a.cols),
            right: (b.rows, b.cols),
        });
    }
    let mut acc = vec![0.0f64; b.cols];
    let mut seen = vec![false; b.cols];
    let mut touched: Vec<usize> = Vec::new();

    let mut row_offsets = vec![0usize; a.rows + 1];
    let mut col_indices: Vec<usize> = Vec::new();
    let mut values: Vec<f64> = Vec::new();

    for r in 0..a.rows {
        let (a_cols, a_vals) = a.row(r);
        for (&k, &av) in a_cols.iter().zip(a_vals) {
            let (b_cols, b_vals) = b.row(k);
            for (&c, &bv) in b_cols.iter().zip(b_vals) {
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                acc[c] += av * bv;
            }
        }
        touched.sort_unstable();
        for &c in &touched {
            let v = acc[c];
            acc[c] = 0.0;
            seen[c] = false;
            if v.abs() >= DROP_TOLERANCE {
                col_indices.push(c);
                values.push(v);
            }
        }
        touched.clear();
        row_offsets[r + 1] = values.len();
    }
    Ok(SparseMatrix {
        rows: a.rows,
        cols: b.cols,
        row_offsets,
        col_indices,
        values,
    })
}

/// Result of [`normalize_symmetric`]: the scaled matrix plus the number of
/// rows whose degree was zero (left untouched as all-zero rows).
#[derive(Debug, Clone)]
pub struct Normalized {
    pub matrix: SparseMatrix,
    pub zero_degree_rows: usize,
}

/// Degree-symmetric normalization `D^{-1/2} (A + I) D^{-1/2}` (with
/// `add_self_loops`) or `D^{-1/2} A D^{-1/2}` (without), where `D` holds the
/// row sums of the matrix being normalized.
///
/// Requires a square, non-negative matrix symmetric within
/// [`SYMMETRY_TOLERANCE`]. The input is averaged with its transpose before
/// scaling, so the output is exactly symmetric; for an exactly symmetric
/// input the averaging is a bitwise no-op. Zero-degree rows (possible only
/// without self-loops) stay all-zero and are reported, not rejected:
/// isolated vertices are legitimate.
pub fn normalize_symmetric(a: &SparseMatrix, add_self_loops: bool) -> Result<Normalized> {
    if a.rows != a.cols {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    for (r, c, v) in a.iter_entries() {
        if v < 0.0 {
            return Err(Error::NegativeEntry {
                row: r,
                col: c,
                value: v,
            });
        }
    }
    let asym = a.max_asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { max_abs_diff: asym });
    }

    let mut m = a.symmetrize_average()?;
    if add_self_loops {
        m = m.plus_identity()?;
    }

    let degree: Vec<f64> = (0..m.rows).map(|r| m.row(r).1.iter().sum()).collect();
    let mut zero_degree_rows = 0;
    let scale: Vec<f64> = degree
        .iter()
        .map(|&d| {
            if d > 0.0 {
                1.0 / fmath::sqrt(d)
            } else {
                zero_degree_rows += 1;
                0.0
            }
        })
        .collect();

    // (s_i * s_j) is computed as a single product so the scaled entry is
    // bitwise identical on both sides of the diagonal.
    let entries: Vec<(usize, usize, f64)> = m
        .iter_entries()
        .map(|(r, c, v)| (r, c, (scale[r] * scale[c]) * v))
        .collect();
    let matrix = SparseMatrix::from_triplets(m.rows, m.cols, &entries)?;
    Ok(Normalized {
        matrix,
        zero_degree_rows,
    })
}

/// `a^k` by repeated multiplication; `k = 0` yields the identity.
pub fn matrix_power(a: &SparseMatrix, k: usize) -> Result<SparseMatrix> {
    if a.rows != a.cols {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if k == 0 {
        return Ok(SparseMatrix::identity(a.rows));
    }
    let mut out = a.clone();
    for _ in 1..k {
        out = sp_sp_mm(&out, a)?;
    }
    Ok(out)
}
