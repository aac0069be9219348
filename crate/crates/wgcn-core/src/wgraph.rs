//! Word-level graph construction.
//!
//! The graph over vocabulary terms comes from one of two sources:
//!
//! * sliding-window co-occurrence statistics turned into a PMI or NPMI
//!   adjacency, or
//! * the gram matrix of the document-word counts, optionally lifted through
//!   `k` hops of a document-document citation graph.
//!
//! Either way the adjacency is symmetrically normalized before use, and the
//! result is fixed at training time: inference never adds nodes.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::fmath;
use crate::sparse::{self, SparseMatrix};

/// Sliding-window co-occurrence counts over the training corpus.
///
/// `window_count` is the total number of windows #W, `unigram_window_counts[i]`
/// the number of windows containing token `i` at least once, and the pair map
/// counts windows containing both tokens of an unordered pair (stored once,
/// keyed with the smaller id first). A window contributes at most one count
/// per token and per pair, no matter how often a token repeats inside it.
#[derive(Debug, Clone)]
pub struct CooccurrenceStats {
    window_count: u64,
    unigram_window_counts: Vec<u64>,
    pair_window_counts: HashMap<(u32, u32), u64>,
    window_size: usize,
}

impl CooccurrenceStats {
    pub fn window_count(&self) -> u64 {
        self.window_count
    }

    pub fn unigram_window_counts(&self) -> &[u64] {
        &self.unigram_window_counts
    }

    pub fn pair_window_count(&self, i: u32, j: u32) -> u64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.pair_window_counts.get(&key).copied().unwrap_or(0)
    }

    pub fn num_pairs(&self) -> usize {
        self.pair_window_counts.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.unigram_window_counts.len()
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    /// Pairs and counts sorted by (i, j); deterministic regardless of map
    /// iteration order.
    pub fn sorted_pairs(&self) -> Vec<(u32, u32, u64)> {
        let mut out: Vec<(u32, u32, u64)> = self
            .pair_window_counts
            .iter()
            .map(|(&(i, j), &c)| (i, j, c))
            .collect();
        out.sort_unstable_by_key(|&(i, j, _)| (i, j));
        out
    }
}

/// Count sliding windows over tokenized training documents.
///
/// Every contiguous span of `window_size` tokens is one window; a non-empty
/// document shorter than the window contributes exactly one window (the whole
/// document). Empty documents contribute no windows.
pub fn count_windows(
    docs: &[Vec<u32>],
    vocab_size: usize,
    window_size: usize,
) -> Result<CooccurrenceStats> {
    if window_size < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "window_size must be at least 2, got {window_size}"
        )));
    }
    if docs.is_empty() || docs.iter().all(|d| d.is_empty()) {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }

    let mut window_count = 0u64;
    let mut unigram = vec![0u64; vocab_size];
    let mut pairs: HashMap<(u32, u32), u64> = HashMap::new();
    let mut uniq: Vec<u32> = Vec::with_capacity(window_size);

    for doc in docs {
        for &t in doc {
            if t as usize >= vocab_size {
                return Err(Error::InvalidArgument(alloc::format!(
                    "token id {t} out of range for vocabulary of {vocab_size}"
                )));
            }
        }
        if doc.is_empty() {
            continue;
        }
        let spans = if doc.len() <= window_size {
            1
        } else {
            doc.len() - window_size + 1
        };
        for start in 0..spans {
            let end = usize::min(start + window_size, doc.len());
            window_count += 1;
            uniq.clear();
            uniq.extend_from_slice(&doc[start..end]);
            uniq.sort_unstable();
            uniq.dedup();
            for (a, &ti) in uniq.iter().enumerate() {
                unigram[ti as usize] += 1;
                for &tj in &uniq[a + 1..] {
                    *pairs.entry((ti, tj)).or_insert(0) += 1;
                }
            }
        }
    }

    Ok(CooccurrenceStats {
        window_count,
        unigram_window_counts: unigram,
        pair_window_counts: pairs,
        window_size,
    })
}

/// Which association measure weighs word-word edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmiVariant {
    Pmi,
    Npmi,
}

/// PMI(i, j) = ln( #W(i,j) * #W / (#W(i) * #W(j)) ).
pub fn pmi_value(stats: &CooccurrenceStats, pair_count: u64, i: u32, j: u32) -> f64 {
    let w = stats.window_count as f64;
    let ui = stats.unigram_window_counts[i as usize] as f64;
    let uj = stats.unigram_window_counts[j as usize] as f64;
    fmath::ln((pair_count as f64 * w) / (ui * uj))
}

/// NPMI(i, j) = PMI(i, j) / ln( #W / #W(i,j) ), clamped to the supremum 1.
///
/// A pair that co-occurs in every window has a zero denominator; such pairs
/// take the continuity-limit weight 1.
pub fn npmi_value(stats: &CooccurrenceStats, pair_count: u64, i: u32, j: u32) -> f64 {
    if pair_count == stats.window_count {
        return 1.0;
    }
    let denom = fmath::ln(stats.window_count as f64 / pair_count as f64);
    (pmi_value(stats, pair_count, i, j) / denom).min(1.0)
}

/// How a word graph was produced; a plain gram graph is a citation lift of
/// order zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordGraphKind {
    Pmi,
    Npmi,
    CitationLifted { order: usize },
}

/// Normalized word-word adjacency plus provenance.
#[derive(Debug, Clone)]
pub struct WordGraph {
    adjacency: SparseMatrix,
    kind: WordGraphKind,
    propagation_order: usize,
}

impl WordGraph {
    /// Assemble from a prebuilt (square) adjacency; used by deserialization
    /// and by tests that need unnormalized graphs.
    pub fn from_parts(
        adjacency: SparseMatrix,
        kind: WordGraphKind,
        propagation_order: usize,
    ) -> Result<Self> {
        if adjacency.rows() != adjacency.cols() {
            return Err(Error::NotSquare {
                rows: adjacency.rows(),
                cols: adjacency.cols(),
            });
        }
        Ok(WordGraph {
            adjacency,
            kind,
            propagation_order,
        })
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn kind(&self) -> WordGraphKind {
        self.kind
    }

    pub fn vocab_size(&self) -> usize {
        self.adjacency.rows()
    }

    /// Recommended number of propagation steps recorded with the graph.
    pub fn propagation_order(&self) -> usize {
        self.propagation_order
    }

    pub fn with_propagation_order(mut self, n: usize) -> Self {
        self.propagation_order = n;
        self
    }
}

/// Build the PMI/NPMI word graph: edges where the association exceeds
/// `threshold` (strictly), unit self-loops on every word, then symmetric
/// normalization.
pub fn build_pmi_graph(
    stats: &CooccurrenceStats,
    variant: PmiVariant,
    threshold: f64,
) -> Result<WordGraph> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "threshold must be non-negative, got {threshold}"
        )));
    }
    let v = stats.vocab_size();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (i, j, c) in stats.sorted_pairs() {
        let value = match variant {
            PmiVariant::Pmi => pmi_value(stats, c, i, j),
            PmiVariant::Npmi => npmi_value(stats, c, i, j),
        };
        if value > threshold {
            entries.push((i as usize, j as usize, value));
            entries.push((j as usize, i as usize, value));
        }
    }
    entries.extend((0..v).map(|i| (i, i, 1.0)));
    let adjacency = SparseMatrix::from_triplets(v, v, &entries)?;
    let normalized = sparse::normalize_symmetric(&adjacency, false)?;
    WordGraph::from_parts(
        normalized.matrix,
        match variant {
            PmiVariant::Pmi => WordGraphKind::Pmi,
            PmiVariant::Npmi => WordGraphKind::Npmi,
        },
        1,
    )
}

/// Unnormalized word co-occurrence gram matrix `X^T X`.
pub fn gram_matrix(x: &SparseMatrix) -> Result<SparseMatrix> {
    sparse::sp_sp_mm(&x.transpose(), x)
}

/// Unnormalized citation-lifted word correlation `X^T A^k X`, evaluated as
/// `k` successive products of `normalized_citation` against `X` followed by
/// one transpose-product; the `d x d` power is never materialized.
///
/// For `k >= 1` the result is averaged with its transpose: the chain product
/// is symmetric in exact arithmetic but not bitwise.
pub fn citation_lift_matrix(
    x: &SparseMatrix,
    normalized_citation: &SparseMatrix,
    k: usize,
) -> Result<SparseMatrix> {
    if normalized_citation.rows() != normalized_citation.cols() {
        return Err(Error::NotSquare {
            rows: normalized_citation.rows(),
            cols: normalized_citation.cols(),
        });
    }
    if x.rows() != normalized_citation.rows() {
        return Err(Error::DimensionMismatch {
            op: "citation_lift_matrix",
            left: (normalized_citation.rows(), normalized_citation.cols()),
            right: (x.rows(), x.cols()),
        });
    }
    if k == 0 {
        return gram_matrix(x);
    }
    let mut propagated = x.clone();
    for _ in 0..k {
        propagated = sparse::sp_sp_mm(normalized_citation, &propagated)?;
    }
    let lifted = sparse::sp_sp_mm(&x.transpose(), &propagated)?;
    lifted.symmetrize_average()
}

/// Word graph from the gram matrix of the training features, with self-loops
/// added during normalization.
pub fn build_cooccurrence_gram_graph(x: &SparseMatrix) -> Result<WordGraph> {
    let gram = gram_matrix(x)?;
    let normalized = sparse::normalize_symmetric(&gram, true)?;
    WordGraph::from_parts(
        normalized.matrix,
        WordGraphKind::CitationLifted { order: 0 },
        1,
    )
}

/// Word graph lifted through `k` hops of a citation graph. The raw citation
/// adjacency is normalized (with self-loops) first, the lift computed, and
/// the lifted matrix normalized (with self-loops) in turn. `k = 0` takes the
/// same code path as [`build_cooccurrence_gram_graph`].
pub fn build_citation_lifted_graph(
    x: &SparseMatrix,
    citation: &SparseMatrix,
    k: usize,
) -> Result<WordGraph> {
    if k == 0 {
        let g = build_cooccurrence_gram_graph(x)?;
        return Ok(WordGraph {
            adjacency: g.adjacency,
            kind: WordGraphKind::CitationLifted { order: 0 },
            propagation_order: g.propagation_order,
        });
    }
    let normalized_citation = sparse::normalize_symmetric(citation, true)?;
    let lifted = citation_lift_matrix(x, &normalized_citation.matrix, k)?;
    let normalized = sparse::normalize_symmetric(&lifted, true)?;
    WordGraph::from_parts(
        normalized.matrix,
        WordGraphKind::CitationLifted { order: k },
        1,
    )
}
