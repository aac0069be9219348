//! Reference tokenizer, vocabulary, and weighting for corpus-ingestion tests.

use std::collections::HashMap;

use crate::matrix::Mat;

/// Lowercase whitespace tokenization, same convention the pipeline uses.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace().map(|t| t.to_lowercase()).collect()
}

/// Vocabulary in first-appearance order over the training documents, keeping
/// tokens whose document frequency is at least `min_doc_freq`.
pub fn reference_vocabulary(train_docs: &[Vec<String>], min_doc_freq: usize) -> Vec<String> {
    let mut doc_freq: HashMap<&str, usize> = HashMap::new();
    for doc in train_docs {
        let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for tok in seen {
            *doc_freq.entry(tok).or_insert(0) += 1;
        }
    }
    let mut vocab = Vec::new();
    for doc in train_docs {
        for tok in doc {
            if doc_freq[tok.as_str()] >= min_doc_freq && !vocab.contains(tok) {
                vocab.push(tok.clone());
            }
        }
    }
    vocab
}

/// Per-token document frequency over the training documents, in vocabulary
/// order.
pub fn reference_doc_freq(train_docs: &[Vec<String>], vocab: &[String]) -> Vec<usize> {
    vocab
        .iter()
        .map(|tok| train_docs.iter().filter(|d| d.contains(tok)).count())
        .collect()
}

/// Dense count matrix over the given vocabulary; unknown tokens are dropped.
pub fn reference_counts(docs: &[Vec<String>], vocab: &[String]) -> Mat {
    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    docs.iter()
        .map(|doc| {
            let mut row = vec![0.0; vocab.len()];
            for tok in doc {
                if let Some(&i) = index.get(tok.as_str()) {
                    row[i] += 1.0;
                }
            }
            row
        })
        .collect()
}

/// Term frequency: counts scaled by document length (kept token count).
pub fn reference_tf(counts: &Mat) -> Mat {
    counts
        .iter()
        .map(|row| {
            let len: f64 = row.iter().sum();
            if len == 0.0 {
                row.clone()
            } else {
                row.iter().map(|&c| c / len).collect()
            }
        })
        .collect()
}

/// tf * ln(total_docs / doc_freq), then L1 row normalization.
pub fn reference_tfidf_l1(counts: &Mat, doc_freq: &[usize], total_docs: usize) -> Mat {
    let tf = reference_tf(counts);
    tf.iter()
        .map(|row| {
            let mut out: Vec<f64> = row
                .iter()
                .zip(doc_freq)
                .map(|(&t, &df)| {
                    if df == 0 {
                        0.0
                    } else {
                        t * (total_docs as f64 / df as f64).ln()
                    }
                })
                .collect();
            let norm: f64 = out.iter().map(|v| v.abs()).sum();
            if norm > 0.0 {
                for v in &mut out {
                    *v /= norm;
                }
            }
            out
        })
        .collect()
}
