//! Sliding-window co-occurrence counting by literal enumeration, plus dense
//! PMI/NPMI matrices.

use std::collections::BTreeSet;

use crate::matrix::Mat;

/// Window counts gathered by materializing every window as a token set.
pub struct WindowCounts {
    pub window_count: u64,
    pub unigram: Vec<u64>,
    /// Dense symmetric pair-count matrix; the diagonal is unused.
    pub pair: Vec<Vec<u64>>,
}

/// Enumerate every window: each contiguous span of `window_size` tokens, or
/// the whole document when it is shorter (empty documents contribute none).
pub fn enumerate_windows(docs: &[Vec<u32>], vocab_size: usize, window_size: usize) -> WindowCounts {
    let mut window_count = 0u64;
    let mut unigram = vec![0u64; vocab_size];
    let mut pair = vec![vec![0u64; vocab_size]; vocab_size];

    for doc in docs {
        if doc.is_empty() {
            continue;
        }
        let spans: Vec<&[u32]> = if doc.len() <= window_size {
            vec![&doc[..]]
        } else {
            doc.windows(window_size).collect()
        };
        for span in spans {
            window_count += 1;
            let set: BTreeSet<u32> = span.iter().copied().collect();
            for &i in &set {
                unigram[i as usize] += 1;
            }
            for &i in &set {
                for &j in &set {
                    if i < j {
                        pair[i as usize][j as usize] += 1;
                        pair[j as usize][i as usize] += 1;
                    }
                }
            }
        }
    }

    WindowCounts {
        window_count,
        unigram,
        pair,
    }
}

/// Dense PMI and NPMI matrices from enumerated counts, computed through
/// window probabilities. Pairs that never co-occur are marked
/// `f64::NEG_INFINITY` in both outputs. Pairs present in every window take
/// the NPMI supremum 1 (zero denominator, continuity limit), and NPMI is
/// clamped to at most 1.
pub fn pmi_matrices(counts: &WindowCounts) -> (Mat, Mat) {
    let v = counts.unigram.len();
    let w = counts.window_count as f64;
    let mut pmi = vec![vec![f64::NEG_INFINITY; v]; v];
    let mut npmi = vec![vec![f64::NEG_INFINITY; v]; v];
    for i in 0..v {
        for j in 0..v {
            if i == j {
                continue;
            }
            let c = counts.pair[i][j];
            if c == 0 {
                continue;
            }
            let p_ij = c as f64 / w;
            let p_i = counts.unigram[i] as f64 / w;
            let p_j = counts.unigram[j] as f64 / w;
            let value = (p_ij / (p_i * p_j)).ln();
            pmi[i][j] = value;
            npmi[i][j] = if c == counts.window_count {
                1.0
            } else {
                (value / -p_ij.ln()).min(1.0)
            };
        }
    }
    (pmi, npmi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_counts() {
        let docs = vec![vec![0, 1], vec![0, 1], vec![2, 3]];
        let counts = enumerate_windows(&docs, 4, 2);
        assert_eq!(counts.window_count, 3);
        assert_eq!(counts.unigram, vec![2, 2, 1, 1]);
        assert_eq!(counts.pair[0][1], 2);
        assert_eq!(counts.pair[2][3], 1);
        assert_eq!(counts.pair[0][2], 0);
    }

    #[test]
    fn single_window_pairs_take_the_supremum() {
        // One document, shorter than the window: a single window where
        // every pair has p = 1.
        let counts = enumerate_windows(&[vec![0, 1, 2]], 3, 10);
        assert_eq!(counts.window_count, 1);
        let (_, npmi) = pmi_matrices(&counts);
        assert_eq!(npmi[0][1], 1.0);
        assert_eq!(npmi[1][2], 1.0);
    }
}
