//! Sparse kernels against the dense brute-force reference.

mod common;

use common::*;
use proptest::prelude::*;
use wgcn_core::{matrix_power, normalize_symmetric, sp_sp_mm, spmm, Rng, SparseMatrix};
use wgcn_oracle::matrix;

#[test]
fn spmm_seed_42_instance_matches_dense_product() {
    let mut rng = Rng::from_seed(42);
    let a = random_sparse(&mut rng, 5, 4, 0.3);
    let b = random_dense(&mut rng, 4, 3);
    let got = spmm(&a, &b).unwrap();
    let want = matrix::matmul(&sparse_to_mat(&a), &dense_to_mat(&b)).unwrap();
    assert!(mat_vs_dense(&want, &got) < 1e-12);
}

#[test]
fn spmm_matches_dense_reference_across_seeds() {
    for seed in 0..100 {
        let mut rng = Rng::from_seed(seed);
        let rows = 2 + (rng.uniform() * 48.0) as usize;
        let inner = 2 + (rng.uniform() * 48.0) as usize;
        let cols = 2 + (rng.uniform() * 20.0) as usize;
        let a = random_sparse(&mut rng, rows, inner, 0.25);
        let b = random_dense(&mut rng, inner, cols);
        let got = spmm(&a, &b).unwrap();
        let want = matrix::matmul(&sparse_to_mat(&a), &dense_to_mat(&b)).unwrap();
        assert!(
            mat_vs_dense(&want, &got) < 1e-12,
            "seed {seed}: spmm disagrees with dense reference"
        );
    }
}

#[test]
fn sp_sp_mm_matches_dense_reference_across_seeds() {
    for seed in 0..100 {
        let mut rng = Rng::from_seed(1_000 + seed);
        let rows = 2 + (rng.uniform() * 30.0) as usize;
        let inner = 2 + (rng.uniform() * 30.0) as usize;
        let cols = 2 + (rng.uniform() * 30.0) as usize;
        let a = random_sparse(&mut rng, rows, inner, 0.3);
        let b = random_sparse(&mut rng, inner, cols, 0.3);
        let got = sp_sp_mm(&a, &b).unwrap();
        let want = matrix::matmul(&sparse_to_mat(&a), &sparse_to_mat(&b)).unwrap();
        // The kernel drops magnitudes below 1e-12, so agreement is to that level.
        assert!(
            mat_vs_sparse(&want, &got) < 1e-12,
            "seed {seed}: sp_sp_mm disagrees with dense reference"
        );
    }
}

#[test]
fn random_square_matches_dense_square() {
    let mut rng = Rng::from_seed(6);
    let a = random_sparse(&mut rng, 6, 6, 0.4);
    let got = sp_sp_mm(&a, &a).unwrap();
    let am = sparse_to_mat(&a);
    let want = matrix::matmul(&am, &am).unwrap();
    assert!(mat_vs_sparse(&want, &got) < 1e-12);
}

#[test]
fn normalize_matches_dense_reference_across_seeds() {
    for seed in 0..100 {
        let mut rng = Rng::from_seed(2_000 + seed);
        let n = 2 + (rng.uniform() * 18.0) as usize;
        let a = random_symmetric_nonneg(&mut rng, n, 0.3);
        for add_loops in [true, false] {
            let got = normalize_symmetric(&a, add_loops).unwrap();
            let want = matrix::normalize_symmetric(&sparse_to_mat(&a), add_loops);
            assert!(
                mat_vs_sparse(&want, &got.matrix) < 1e-10,
                "seed {seed}: normalization disagrees with dense reference"
            );
        }
    }
}

#[test]
fn normalized_spectrum_stays_in_unit_interval() {
    for seed in 0..25 {
        let mut rng = Rng::from_seed(3_000 + seed);
        let n = 2 + (rng.uniform() * 18.0) as usize;
        let a = random_symmetric_nonneg(&mut rng, n, 0.35);
        let got = normalize_symmetric(&a, true).unwrap().matrix;
        assert!(got.max_asymmetry() < 1e-12);
        let eigs = matrix::symmetric_eigenvalues(&sparse_to_mat(&got));
        for &e in &eigs {
            assert!(
                (-1.0 - 1e-9..=1.0 + 1e-9).contains(&e),
                "seed {seed}: eigenvalue {e} outside [-1, 1]"
            );
        }
    }
}

#[test]
fn power_matches_dense_reference() {
    for seed in 0..50 {
        let mut rng = Rng::from_seed(4_000 + seed);
        let n = 2 + (rng.uniform() * 10.0) as usize;
        let a = random_sparse(&mut rng, n, n, 0.4);
        for k in 0..4 {
            let got = matrix_power(&a, k).unwrap();
            let want = matrix::power(&sparse_to_mat(&a), k).unwrap();
            assert!(
                mat_vs_sparse(&want, &got) < 1e-9,
                "seed {seed}: power {k} disagrees with dense reference"
            );
        }
    }
}

#[test]
fn symmetric_cube_matches_dense_reference() {
    let mut rng = Rng::from_seed(5);
    let a = random_symmetric_nonneg(&mut rng, 5, 0.5);
    let got = matrix_power(&a, 3).unwrap();
    let want = matrix::power(&sparse_to_mat(&a), 3).unwrap();
    assert!(mat_vs_sparse(&want, &got) < 1e-9);
}

#[test]
fn power_is_additive_in_the_exponent() {
    for seed in 0..20 {
        let mut rng = Rng::from_seed(5_000 + seed);
        let a = random_sparse(&mut rng, 6, 6, 0.4);
        for (j, k) in [(1, 2), (2, 2), (0, 3)] {
            let combined = matrix_power(&a, j + k).unwrap();
            let split =
                sp_sp_mm(&matrix_power(&a, j).unwrap(), &matrix_power(&a, k).unwrap()).unwrap();
            let diff = matrix::max_abs_diff(&sparse_to_mat(&combined), &sparse_to_mat(&split));
            assert!(
                diff < 1e-9,
                "seed {seed}: A^{j}+{k} differs from A^{j} A^{k}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Canonical CSR invariants survive construction and multiplication.
    #[test]
    fn csr_canonical_after_ops(seed in 0u64..5_000) {
        let mut rng = Rng::from_seed(seed);
        let rows = 1 + (rng.uniform() * 12.0) as usize;
        let inner = 1 + (rng.uniform() * 12.0) as usize;
        let a = random_sparse(&mut rng, rows, inner, 0.3);
        let b = random_sparse(&mut rng, inner, rows, 0.3);
        for m in [a.clone(), a.transpose(), sp_sp_mm(&a, &b).unwrap()] {
            prop_assert_eq!(m.row_offsets()[0], 0);
            prop_assert_eq!(m.row_offsets()[m.rows()], m.nnz());
            for r in 0..m.rows() {
                prop_assert!(m.row_offsets()[r] <= m.row_offsets()[r + 1]);
                let (cols, vals) = m.row(r);
                for i in 0..cols.len() {
                    prop_assert!(cols[i] < m.cols());
                    if i > 0 {
                        prop_assert!(cols[i] > cols[i - 1]);
                    }
                    prop_assert!(vals[i] != 0.0 && vals[i].is_finite());
                }
            }
        }
    }

    /// Normalization output is exactly structured: symmetric, bounded spectrum
    /// implied by the dense check above; here just symmetry and sign.
    #[test]
    fn normalize_output_is_symmetric_nonneg(seed in 0u64..2_000) {
        let mut rng = Rng::from_seed(seed);
        let n = 2 + (rng.uniform() * 10.0) as usize;
        let a = random_symmetric_nonneg(&mut rng, n, 0.4);
        let out = normalize_symmetric(&a, true).unwrap().matrix;
        prop_assert!(out.max_asymmetry() == 0.0);
        prop_assert!(out.values().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn identity_round_trips_through_every_kernel() {
    let i5 = SparseMatrix::identity(5);
    assert_eq!(sp_sp_mm(&i5, &i5).unwrap(), i5);
    assert_eq!(matrix_power(&i5, 7).unwrap(), i5);
    assert_eq!(normalize_symmetric(&i5, false).unwrap().matrix, i5);
}
