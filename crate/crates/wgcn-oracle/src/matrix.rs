//! Textbook dense matrix algebra on `Vec<Vec<f64>>`.

/// Dense matrix as nested vectors; row-major by construction.
pub type Mat = Vec<Vec<f64>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![0.0; cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for i in 0..n {
        m[i][i] = 1.0;
    }
    m
}

pub fn from_triplets(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> Mat {
    let mut m = zeros(rows, cols);
    for &(r, c, v) in entries {
        m[r][c] += v;
    }
    m
}

pub fn transpose(a: &Mat) -> Mat {
    let (rows, cols) = shape(a);
    let mut out = zeros(cols, rows);
    for i in 0..rows {
        for j in 0..cols {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn shape(a: &Mat) -> (usize, usize) {
    (a.len(), a.first().map_or(0, |r| r.len()))
}

/// O(n^3) triple loop, k innermost ascending.
pub fn matmul(a: &Mat, b: &Mat) -> Result<Mat, String> {
    let (ar, ac) = shape(a);
    let (br, bc) = shape(b);
    if ac != br {
        return Err(format!("matmul: {ar}x{ac} against {br}x{bc}"));
    }
    let mut out = zeros(ar, bc);
    for i in 0..ar {
        for j in 0..bc {
            let mut sum = 0.0;
            for k in 0..ac {
                sum += a[i][k] * b[k][j];
            }
            out[i][j] = sum;
        }
    }
    Ok(out)
}

pub fn power(a: &Mat, k: usize) -> Result<Mat, String> {
    let (rows, cols) = shape(a);
    if rows != cols {
        return Err(format!("power: {rows}x{cols} is not square"));
    }
    let mut out = identity(rows);
    for _ in 0..k {
        out = matmul(&out, a)?;
    }
    Ok(out)
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(shape(a), shape(b), "comparing mismatched shapes");
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (&x, &y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// Dense recomputation of `D^{-1/2} (A + I) D^{-1/2}` (or without the `+ I`),
/// `D` holding row sums of the matrix being scaled; zero-degree rows stay
/// zero.
pub fn normalize_symmetric(a: &Mat, add_self_loops: bool) -> Mat {
    let n = a.len();
    let mut m = a.clone();
    if add_self_loops {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1.0;
        }
    }
    let scale: Vec<f64> = m
        .iter()
        .map(|row| {
            let d: f64 = row.iter().sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            m[i][j] *= scale[i] * scale[j];
        }
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Good to ~1e-12 on the small instances tests use.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-15 {
                    continue;
                }
                let theta = 0.5 * (2.0 * m[p][q]).atan2(m[q][q] - m[p][p]);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_finds_known_spectrum() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let eigs = symmetric_eigenvalues(&vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_k2_is_all_half() {
        let k2 = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let n = normalize_symmetric(&k2, true);
        for row in &n {
            for &v in row {
                assert!((v - 0.5).abs() < 1e-15);
            }
        }
    }
}
