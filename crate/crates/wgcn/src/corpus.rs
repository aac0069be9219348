//! Dataset ingestion: labeled text corpora and citation-network datasets.
//!
//! The vocabulary always comes from training documents alone — tokens first
//! seen at test time are dropped everywhere. That restriction is what makes
//! inference inductive: an unseen document is just a (possibly partial)
//! projection onto the fixed training vocabulary.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wgcn_core::model::TrainData;
use wgcn_core::{Rng, SparseMatrix};

use crate::error::{Error, Result};

/// Bidirectional token map with training-corpus document frequencies.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    token_to_id: HashMap<String, u32>,
    id_to_token: Vec<String>,
    doc_freq: Vec<u32>,
    total_docs: usize,
}

impl Vocabulary {
    /// First-appearance ordering over the training documents, keeping tokens
    /// that occur in at least `min_freq` documents.
    pub fn from_train_docs(train_docs: &[Vec<String>], min_freq: u32) -> Self {
        let mut doc_freq: HashMap<&str, u32> = HashMap::new();
        for doc in train_docs {
            let unique: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
            for tok in unique {
                *doc_freq.entry(tok).or_insert(0) += 1;
            }
        }
        let mut token_to_id = HashMap::new();
        let mut id_to_token = Vec::new();
        let mut kept_freq = Vec::new();
        for doc in train_docs {
            for tok in doc {
                let df = doc_freq[tok.as_str()];
                if df >= min_freq && !token_to_id.contains_key(tok) {
                    token_to_id.insert(tok.clone(), id_to_token.len() as u32);
                    id_to_token.push(tok.clone());
                    kept_freq.push(df);
                }
            }
        }
        Vocabulary {
            token_to_id,
            id_to_token,
            doc_freq: kept_freq,
            total_docs: train_docs.len(),
        }
    }

    /// Rebuild from serialized parts (graph sidecars).
    pub fn from_parts(tokens: Vec<String>, doc_freq: Vec<u32>, total_docs: usize) -> Result<Self> {
        if tokens.len() != doc_freq.len() {
            return Err(Error::InvalidArgument(
                "vocabulary tokens and doc_freq lengths differ".into(),
            ));
        }
        let token_to_id = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            token_to_id,
            id_to_token: tokens,
            doc_freq,
            total_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.id_to_token[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    pub fn doc_freq(&self) -> &[u32] {
        &self.doc_freq
    }

    pub fn total_docs(&self) -> usize {
        self.total_docs
    }
}

/// Lowercase whitespace tokenization. Inputs are expected pre-cleaned of
/// punctuation, which keeps the tokenizer trivially auditable.
pub fn tokenize(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_lowercase).collect()
}

/// Feature weighting schemes for the document-word matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Count,
    Tf,
    TfidfL1,
}

impl std::str::FromStr for Weighting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "count" => Ok(Weighting::Count),
            "tf" => Ok(Weighting::Tf),
            "tfidf-l1" | "tfidf" => Ok(Weighting::TfidfL1),
            other => Err(format!("unknown weighting `{other}`")),
        }
    }
}

/// Document-word matrix plus the scheme its values follow.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub matrix: SparseMatrix,
    pub weighting: Weighting,
}

/// Split assignment, labels, and label names for one dataset.
#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub train_ids: Vec<usize>,
    pub dev_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub label_names: Vec<String>,
}

/// Document-document citation adjacency: binary, symmetric, zero diagonal.
#[derive(Debug, Clone)]
pub struct CitationGraph {
    adjacency: SparseMatrix,
}

impl CitationGraph {
    pub fn from_edges(num_docs: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut unique: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(a, b) in edges {
            if a >= num_docs || b >= num_docs {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a}, {b}) out of range for {num_docs} documents"
                )));
            }
            if a == b {
                continue;
            }
            unique.insert((a.min(b), a.max(b)));
        }
        let mut entries = Vec::with_capacity(unique.len() * 2);
        for (a, b) in unique {
            entries.push((a, b, 1.0));
            entries.push((b, a, 1.0));
        }
        Ok(CitationGraph {
            adjacency: SparseMatrix::from_triplets(num_docs, num_docs, &entries)?,
        })
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn num_docs(&self) -> usize {
        self.adjacency.rows()
    }
}

/// Ingestion knobs; `min_freq` is a document-frequency threshold.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub min_freq: u32,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { min_freq: 5 }
    }
}

/// Warning counters gathered during ingestion (never errors).
#[derive(Debug, Clone, Default)]
pub struct IngestStats {
    /// Token occurrences dropped for being outside the training vocabulary.
    pub oov_occurrences: u64,
    /// Documents whose feature row ended up all-zero.
    pub empty_docs: usize,
}

/// A fully ingested text corpus. `features` holds raw counts; reweight with
/// [`apply_weighting`]. `token_ids` preserves token order per document for
/// window counting.
#[derive(Debug, Clone)]
pub struct TextCorpus {
    pub vocabulary: Vocabulary,
    pub features: FeatureMatrix,
    pub split: CorpusSplit,
    pub token_ids: Vec<Vec<u32>>,
    pub stats: IngestStats,
}

impl TextCorpus {
    /// Token-id sequences of the training documents, for window counting.
    pub fn train_token_ids(&self) -> Vec<Vec<u32>> {
        self.split
            .train_ids
            .iter()
            .map(|&i| self.token_ids[i].clone())
            .collect()
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

struct MetaLine {
    split: String,
    label: String,
}

fn parse_meta(path: &Path, expect_lines: usize) -> Result<Vec<MetaLine>> {
    let lines = read_lines(path)?;
    if lines.len() != expect_lines {
        return Err(Error::format(
            path,
            format!(
                "metadata has {} lines but the corpus has {expect_lines} documents",
                lines.len()
            ),
        ));
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(_id), Some(split), Some(label)) => {
                    if !matches!(split, "train" | "dev" | "test") {
                        return Err(Error::format(
                            path,
                            format!("line {}: unknown split `{split}`", i + 1),
                        ));
                    }
                    Ok(MetaLine {
                        split: split.to_string(),
                        label: label.to_string(),
                    })
                }
                _ => Err(Error::format(
                    path,
                    format!("line {}: expected id<TAB>split<TAB>label", i + 1),
                )),
            }
        })
        .collect()
}

fn build_split(meta: &[MetaLine]) -> CorpusSplit {
    let mut label_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(meta.len());
    let (mut train_ids, mut dev_ids, mut test_ids) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in meta.iter().enumerate() {
        let label = match label_names.iter().position(|l| l == &line.label) {
            Some(idx) => idx,
            None => {
                label_names.push(line.label.clone());
                label_names.len() - 1
            }
        };
        labels.push(label);
        match line.split.as_str() {
            "train" => train_ids.push(i),
            "dev" => dev_ids.push(i),
            _ => test_ids.push(i),
        }
    }
    CorpusSplit {
        train_ids,
        dev_ids,
        test_ids,
        labels,
        num_classes: label_names.len(),
        label_names,
    }
}

/// Feature rows over a fixed vocabulary, dropping out-of-vocabulary tokens.
pub fn featurize(
    docs: &[Vec<String>],
    vocabulary: &Vocabulary,
    stats: &mut IngestStats,
) -> (SparseMatrix, Vec<Vec<u32>>) {
    let mut entries = Vec::new();
    let mut token_ids = Vec::with_capacity(docs.len());
    for (row, doc) in docs.iter().enumerate() {
        let mut ids = Vec::with_capacity(doc.len());
        let mut counts: HashMap<u32, f64> = HashMap::new();
        for tok in doc {
            match vocabulary.id_of(tok) {
                Some(id) => {
                    ids.push(id);
                    *counts.entry(id).or_insert(0.0) += 1.0;
                }
                None => stats.oov_occurrences += 1,
            }
        }
        if counts.is_empty() {
            stats.empty_docs += 1;
        }
        entries.extend(counts.into_iter().map(|(c, v)| (row, c as usize, v)));
        token_ids.push(ids);
    }
    let matrix = SparseMatrix::from_triplets(docs.len(), vocabulary.len(), &entries)
        .expect("in-range triplets");
    (matrix, token_ids)
}

/// Ingest a labeled text corpus: one whitespace-tokenizable document per
/// line, and a metadata file of matching length with `id<TAB>split<TAB>label`
/// rows. Deterministic given the files and options.
pub fn ingest_text_corpus(
    docs_path: &Path,
    meta_path: &Path,
    opts: &IngestOptions,
) -> Result<TextCorpus> {
    let doc_lines = read_lines(docs_path)?;
    let meta = parse_meta(meta_path, doc_lines.len())?;
    let docs: Vec<Vec<String>> = doc_lines.iter().map(|l| tokenize(l)).collect();
    let split = build_split(&meta);
    if split.train_ids.is_empty() {
        return Err(Error::InvalidArgument("empty training split".into()));
    }

    let train_docs: Vec<Vec<String>> = split.train_ids.iter().map(|&i| docs[i].clone()).collect();
    let vocabulary = Vocabulary::from_train_docs(&train_docs, opts.min_freq);

    let mut stats = IngestStats::default();
    let (matrix, token_ids) = featurize(&docs, &vocabulary, &mut stats);
    Ok(TextCorpus {
        vocabulary,
        features: FeatureMatrix {
            matrix,
            weighting: Weighting::Count,
        },
        split,
        token_ids,
        stats,
    })
}

/// An ingested citation dataset: text corpus plus the document graph.
#[derive(Debug, Clone)]
pub struct CitationCorpus {
    pub corpus: TextCorpus,
    pub graph: CitationGraph,
}

/// Ingest a citation dataset: `id<TAB>split<TAB>label<TAB>tokens` node lines
/// and `id<TAB>id` edges. Edges are symmetrized, self-edges dropped, and
/// duplicates collapsed. Node features are available for every document in
/// the graph, so the vocabulary is built over all nodes (no frequency
/// threshold).
pub fn ingest_citation_dataset(nodes_path: &Path, edges_path: &Path) -> Result<CitationCorpus> {
    let node_lines = read_lines(nodes_path)?;
    if node_lines.is_empty() {
        return Err(Error::format(nodes_path, "no nodes"));
    }
    let mut meta = Vec::with_capacity(node_lines.len());
    let mut docs = Vec::with_capacity(node_lines.len());
    let mut id_index: HashMap<String, usize> = HashMap::new();
    for (i, line) in node_lines.iter().enumerate() {
        let mut parts = line.splitn(4, '\t');
        let (id, split, label) = match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(split), Some(label)) => (id, split, label),
            _ => {
                return Err(Error::format(
                    nodes_path,
                    format!("line {}: expected id<TAB>split<TAB>label<TAB>tokens", i + 1),
                ))
            }
        };
        if !matches!(split, "train" | "dev" | "test") {
            return Err(Error::format(
                nodes_path,
                format!("line {}: unknown split `{split}`", i + 1),
            ));
        }
        if id_index.insert(id.to_string(), i).is_some() {
            return Err(Error::format(
                nodes_path,
                format!("line {}: duplicate node id `{id}`", i + 1),
            ));
        }
        docs.push(tokenize(parts.next().unwrap_or("")));
        meta.push(MetaLine {
            split: split.to_string(),
            label: label.to_string(),
        });
    }
    let split = build_split(&meta);
    if split.train_ids.is_empty() {
        return Err(Error::InvalidArgument("empty training split".into()));
    }

    let vocabulary = Vocabulary::from_train_docs(&docs, 1);
    let mut stats = IngestStats::default();
    let (matrix, token_ids) = featurize(&docs, &vocabulary, &mut stats);

    let mut edges = Vec::new();
    for (i, line) in read_lines(edges_path)?.iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (a, b) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::format(
                    edges_path,
                    format!("line {}: expected id<TAB>id", i + 1),
                ))
            }
        };
        let resolve = |id: &str| {
            id_index.get(id).copied().ok_or_else(|| {
                Error::format(
                    edges_path,
                    format!("line {}: unknown node id `{id}`", i + 1),
                )
            })
        };
        edges.push((resolve(a)?, resolve(b)?));
    }
    let graph = CitationGraph::from_edges(docs.len(), &edges)?;

    Ok(CitationCorpus {
        corpus: TextCorpus {
            vocabulary,
            features: FeatureMatrix {
                matrix,
                weighting: Weighting::Count,
            },
            split,
            token_ids,
            stats,
        },
        graph,
    })
}

/// Reweight a count matrix. `count` returns the input unchanged; `tf`
/// divides by kept-token document length; `tfidf-l1` multiplies tf by
/// `ln(total_docs / doc_freq)` and L1-normalizes each row. Expects raw
/// counts as input.
pub fn apply_weighting(
    features: &FeatureMatrix,
    scheme: Weighting,
    vocabulary: &Vocabulary,
) -> FeatureMatrix {
    assert_eq!(
        features.weighting,
        Weighting::Count,
        "apply_weighting expects raw counts"
    );
    if scheme == Weighting::Count {
        return features.clone();
    }
    let m = &features.matrix;
    let mut entries = Vec::with_capacity(m.nnz());
    for r in 0..m.rows() {
        let (cols, vals) = m.row(r);
        let len: f64 = vals.iter().sum();
        if len == 0.0 {
            continue;
        }
        let mut row: Vec<(usize, f64)> =
            cols.iter().zip(vals).map(|(&c, &v)| (c, v / len)).collect();
        if scheme == Weighting::TfidfL1 {
            for (c, v) in &mut row {
                let df = vocabulary.doc_freq()[*c] as f64;
                *v *= (vocabulary.total_docs() as f64 / df).ln();
            }
            let norm: f64 = row.iter().map(|(_, v)| v.abs()).sum();
            if norm > 0.0 {
                for (_, v) in &mut row {
                    *v /= norm;
                }
            }
        }
        entries.extend(row.into_iter().map(|(c, v)| (r, c, v)));
    }
    FeatureMatrix {
        matrix: SparseMatrix::from_triplets(m.rows(), m.cols(), &entries)
            .expect("in-range triplets"),
        weighting: scheme,
    }
}

/// Rows of `m` selected by `ids`, in order.
pub fn select_rows(m: &SparseMatrix, ids: &[usize]) -> SparseMatrix {
    let mut entries = Vec::new();
    for (out_row, &src) in ids.iter().enumerate() {
        let (cols, vals) = m.row(src);
        for (&c, &v) in cols.iter().zip(vals) {
            entries.push((out_row, c, v));
        }
    }
    SparseMatrix::from_triplets(ids.len(), m.cols(), &entries).expect("in-range triplets")
}

/// Ensure a dev split exists, carving a seeded fraction out of train when
/// missing. At least one document moves; train keeps at least one.
pub fn carve_dev(split: &CorpusSplit, fraction: f64, seed: u64) -> CorpusSplit {
    if !split.dev_ids.is_empty() || split.train_ids.len() < 2 {
        return split.clone();
    }
    let mut ids = split.train_ids.clone();
    let mut rng = Rng::from_seed(seed);
    // Fisher-Yates.
    for i in (1..ids.len()).rev() {
        let j = (rng.uniform() * (i + 1) as f64) as usize;
        ids.swap(i, j);
    }
    let dev_count = ((ids.len() as f64 * fraction).ceil() as usize)
        .max(1)
        .min(ids.len() - 1);
    let mut dev_ids: Vec<usize> = ids[..dev_count].to_vec();
    let mut train_ids: Vec<usize> = ids[dev_count..].to_vec();
    dev_ids.sort_unstable();
    train_ids.sort_unstable();
    CorpusSplit {
        train_ids,
        dev_ids,
        ..split.clone()
    }
}

/// Assemble the training inputs from weighted features and a split with a
/// non-empty dev set.
pub fn train_data(features: &FeatureMatrix, split: &CorpusSplit) -> TrainData {
    let labels_of = |ids: &[usize]| ids.iter().map(|&i| split.labels[i]).collect();
    TrainData {
        x_train: select_rows(&features.matrix, &split.train_ids),
        y_train: labels_of(&split.train_ids),
        x_dev: select_rows(&features.matrix, &split.dev_ids),
        y_dev: labels_of(&split.dev_ids),
        num_classes: split.num_classes,
    }
}
