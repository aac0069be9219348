//! Window counting and graph construction against the enumeration oracle.

mod common;

use common::*;
use wgcn_core::wgraph::{
    build_citation_lifted_graph, build_pmi_graph, citation_lift_matrix, count_windows, gram_matrix,
    npmi_value, pmi_value, PmiVariant,
};
use wgcn_core::{normalize_symmetric, Rng};
use wgcn_oracle::matrix;
use wgcn_oracle::windows::{enumerate_windows, pmi_matrices};

fn random_corpus(rng: &mut Rng, max_docs: usize, max_len: usize, vocab: usize) -> Vec<Vec<u32>> {
    let docs = 1 + (rng.uniform() * (max_docs - 1) as f64) as usize;
    (0..docs)
        .map(|_| {
            let len = (rng.uniform() * (max_len + 1) as f64) as usize;
            (0..len)
                .map(|_| (rng.uniform() * vocab as f64) as u32)
                .collect()
        })
        .collect()
}

#[test]
fn counts_match_enumeration_exactly_across_seeds() {
    for seed in 0..50 {
        let mut rng = Rng::from_seed(seed);
        let vocab = 4 + (rng.uniform() * 12.0) as usize;
        let window = 2 + (rng.uniform() * 8.0) as usize;
        let docs = random_corpus(&mut rng, 30, 20, vocab);
        if docs.iter().all(|d| d.is_empty()) {
            continue;
        }
        let stats = count_windows(&docs, vocab, window).unwrap();
        let reference = enumerate_windows(&docs, vocab, window);
        assert_eq!(stats.window_count(), reference.window_count, "seed {seed}");
        assert_eq!(
            stats.unigram_window_counts(),
            &reference.unigram[..],
            "seed {seed}"
        );
        for i in 0..vocab as u32 {
            for j in 0..vocab as u32 {
                assert_eq!(
                    stats.pair_window_count(i, j),
                    reference.pair[i as usize][j as usize],
                    "seed {seed}: pair ({i}, {j})"
                );
            }
        }
    }
}

#[test]
fn pmi_and_npmi_values_match_oracle_within_1e12() {
    for seed in 0..50 {
        let mut rng = Rng::from_seed(100 + seed);
        let vocab = 4 + (rng.uniform() * 10.0) as usize;
        let window = 2 + (rng.uniform() * 6.0) as usize;
        let docs = random_corpus(&mut rng, 20, 15, vocab);
        if docs.iter().all(|d| d.is_empty()) {
            continue;
        }
        let stats = count_windows(&docs, vocab, window).unwrap();
        let counts = enumerate_windows(&docs, vocab, window);
        let (pmi_ref, npmi_ref) = pmi_matrices(&counts);
        for i in 0..vocab as u32 {
            for j in (i + 1)..vocab as u32 {
                let c = stats.pair_window_count(i, j);
                if c == 0 {
                    continue;
                }
                let (iu, ju) = (i as usize, j as usize);
                assert!(
                    (pmi_value(&stats, c, i, j) - pmi_ref[iu][ju]).abs() < 1e-12,
                    "seed {seed}: PMI({i},{j})"
                );
                assert!(
                    (npmi_value(&stats, c, i, j) - npmi_ref[iu][ju]).abs() < 1e-12,
                    "seed {seed}: NPMI({i},{j})"
                );
            }
        }
    }
}

#[test]
fn npmi_stays_in_half_open_unit_interval() {
    for seed in 0..30 {
        let mut rng = Rng::from_seed(200 + seed);
        let vocab = 4 + (rng.uniform() * 8.0) as usize;
        let docs = random_corpus(&mut rng, 15, 12, vocab);
        if docs.iter().all(|d| d.is_empty()) {
            continue;
        }
        let stats = count_windows(&docs, vocab, 3).unwrap();
        for (i, j, c) in stats.sorted_pairs() {
            let v = npmi_value(&stats, c, i, j);
            assert!(v > -1.0 && v <= 1.0, "seed {seed}: NPMI {v} out of range");
        }
    }
}

#[test]
fn pmi_graph_matches_dense_normalization_of_thresholded_values() {
    for seed in 0..20 {
        let mut rng = Rng::from_seed(300 + seed);
        let vocab = 4 + (rng.uniform() * 8.0) as usize;
        let docs = random_corpus(&mut rng, 15, 12, vocab);
        if docs.iter().all(|d| d.is_empty()) {
            continue;
        }
        let stats = count_windows(&docs, vocab, 4).unwrap();
        let graph = build_pmi_graph(&stats, PmiVariant::Npmi, 0.0).unwrap();

        // Dense route: thresholded NPMI values plus unit diagonal, normalized.
        let counts = enumerate_windows(&docs, vocab, 4);
        let (_, npmi_ref) = pmi_matrices(&counts);
        let mut dense = matrix::identity(vocab);
        for i in 0..vocab {
            for j in 0..vocab {
                if i != j && npmi_ref[i][j] > 0.0 && npmi_ref[i][j].is_finite() {
                    dense[i][j] = npmi_ref[i][j];
                }
            }
        }
        let want = matrix::normalize_symmetric(&dense, false);
        assert!(
            mat_vs_sparse(&want, graph.adjacency()) < 1e-12,
            "seed {seed}: NPMI graph disagrees with dense route"
        );
    }
}

#[test]
fn pre_normalization_matrices_are_symmetric() {
    for seed in 0..20 {
        let mut rng = Rng::from_seed(400 + seed);
        let x = random_counts(&mut rng, 10, 8, 0.3);
        assert_eq!(gram_matrix(&x).unwrap().max_asymmetry(), 0.0);

        let cite = random_symmetric_nonneg(&mut rng, 10, 0.25);
        let cite_norm = normalize_symmetric(&cite, true).unwrap().matrix;
        for k in 1..=2 {
            let lifted = citation_lift_matrix(&x, &cite_norm, k).unwrap();
            assert_eq!(lifted.max_asymmetry(), 0.0, "seed {seed}, k = {k}");
        }
    }
}

#[test]
fn citation_chain_matches_dense_chain_product() {
    for seed in 0..20 {
        let mut rng = Rng::from_seed(500 + seed);
        let docs = 4 + (rng.uniform() * 16.0) as usize;
        let words = 4 + (rng.uniform() * 11.0) as usize;
        let x = random_counts(&mut rng, docs, words, 0.3);
        let cite = random_symmetric_nonneg(&mut rng, docs, 0.25);
        let cite_norm = normalize_symmetric(&cite, true).unwrap().matrix;
        let xm = sparse_to_mat(&x);
        let cm = sparse_to_mat(&cite_norm);
        for k in 0..=2 {
            let got = citation_lift_matrix(&x, &cite_norm, k).unwrap();
            let want = matrix::matmul(
                &matrix::matmul(&matrix::transpose(&xm), &matrix::power(&cm, k).unwrap()).unwrap(),
                &xm,
            )
            .unwrap();
            assert!(
                mat_vs_sparse(&want, &got) < 1e-9,
                "seed {seed}: lift order {k} disagrees with dense chain"
            );
        }
    }
}

#[test]
fn lift_order_zero_equals_gram_exactly() {
    for seed in 0..10 {
        let mut rng = Rng::from_seed(600 + seed);
        let x = random_counts(&mut rng, 8, 10, 0.3);
        let cite = random_symmetric_nonneg(&mut rng, 8, 0.3);
        let gram = wgcn_core::wgraph::build_cooccurrence_gram_graph(&x).unwrap();
        let lifted = build_citation_lifted_graph(&x, &cite, 0).unwrap();
        assert_eq!(gram.adjacency(), lifted.adjacency(), "seed {seed}");
    }
}
