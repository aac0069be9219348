//! Planted-signal corpus and citation generators: desk-scale datasets with a
//! known learnable structure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Shape of a planted corpus. Each class owns `class_vocab_size` tokens;
/// every token position is drawn from a shared pool with probability
/// `overlap_fraction` and from the class vocabulary otherwise, so overlap 0
/// is separable by construction and overlap 1 is pure chance.
#[derive(Debug, Clone)]
pub struct PlantedCorpusSpec {
    pub num_classes: usize,
    pub docs_per_class: usize,
    pub class_vocab_size: usize,
    pub overlap_fraction: f64,
    pub doc_length: usize,
    pub seed: u64,
}

/// Generated documents in class-major order, with a two-thirds/one-third
/// train/test split inside each class.
#[derive(Debug, Clone)]
pub struct PlantedCorpus {
    pub docs: Vec<Vec<String>>,
    pub labels: Vec<usize>,
    pub train_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
    pub num_classes: usize,
}

impl PlantedCorpusSpec {
    fn validate(&self) -> Result<(), String> {
        if self.num_classes < 2 {
            return Err("need at least 2 classes".into());
        }
        if self.docs_per_class < 3 {
            return Err("need at least 3 documents per class for a split".into());
        }
        if self.class_vocab_size == 0 || self.doc_length == 0 {
            return Err("class_vocab_size and doc_length must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.overlap_fraction) {
            return Err("overlap_fraction must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// Generate a corpus; identical specs produce identical corpora.
pub fn generate_planted_corpus(spec: &PlantedCorpusSpec) -> Result<PlantedCorpus, String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shared: Vec<String> = (0..spec.class_vocab_size)
        .map(|i| format!("shared{i:03}"))
        .collect();
    let class_vocab: Vec<Vec<String>> = (0..spec.num_classes)
        .map(|c| {
            (0..spec.class_vocab_size)
                .map(|i| format!("c{c}w{i:03}"))
                .collect()
        })
        .collect();

    let mut docs = Vec::new();
    let mut labels = Vec::new();
    let mut train_ids = Vec::new();
    let mut test_ids = Vec::new();
    let train_per_class = spec.docs_per_class * 2 / 3;

    for class in 0..spec.num_classes {
        for d in 0..spec.docs_per_class {
            let doc: Vec<String> = (0..spec.doc_length)
                .map(|_| {
                    let pool = if uniform(&mut rng) < spec.overlap_fraction {
                        &shared
                    } else {
                        &class_vocab[class]
                    };
                    pool[(uniform(&mut rng) * pool.len() as f64) as usize].clone()
                })
                .collect();
            let id = docs.len();
            docs.push(doc);
            labels.push(class);
            if d < train_per_class {
                train_ids.push(id);
            } else {
                test_ids.push(id);
            }
        }
    }

    Ok(PlantedCorpus {
        docs,
        labels,
        train_ids,
        test_ids,
        num_classes: spec.num_classes,
    })
}

/// Homophilous citation edges: same-class pairs wired with probability
/// `p_in`, cross-class with `p_out`. Deterministic by seed; no self-edges,
/// each unordered pair decided once.
pub fn planted_citation_edges(
    labels: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..labels.len() {
        for j in (i + 1)..labels.len() {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if uniform(&mut rng) < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Write the corpus in the text-dataset file format: one whitespace-joined
/// document per line, and a matching `id<TAB>split<TAB>label` metadata file.
pub fn write_text_corpus(dir: &Path, corpus: &PlantedCorpus) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let docs_path = dir.join("docs.txt");
    let meta_path = dir.join("meta.tsv");
    let mut docs_file = fs::File::create(&docs_path)?;
    let mut meta_file = fs::File::create(&meta_path)?;
    for (i, doc) in corpus.docs.iter().enumerate() {
        writeln!(docs_file, "{}", doc.join(" "))?;
        let split = if corpus.train_ids.contains(&i) {
            "train"
        } else {
            "test"
        };
        writeln!(meta_file, "doc{i}\t{split}\tclass{}", corpus.labels[i])?;
    }
    Ok((docs_path, meta_path))
}

/// Write the corpus and edges in the citation-dataset file format:
/// `id<TAB>split<TAB>label<TAB>tokens` plus `id<TAB>id` edges.
pub fn write_citation_dataset(
    dir: &Path,
    corpus: &PlantedCorpus,
    edges: &[(usize, usize)],
) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let nodes_path = dir.join("nodes.tsv");
    let edges_path = dir.join("edges.tsv");
    let mut nodes_file = fs::File::create(&nodes_path)?;
    let mut edges_file = fs::File::create(&edges_path)?;
    for (i, doc) in corpus.docs.iter().enumerate() {
        let split = if corpus.train_ids.contains(&i) {
            "train"
        } else {
            "test"
        };
        writeln!(
            nodes_file,
            "doc{i}\t{split}\tclass{}\t{}",
            corpus.labels[i],
            doc.join(" ")
        )?;
    }
    for &(i, j) in edges {
        writeln!(edges_file, "doc{i}\tdoc{j}")?;
    }
    Ok((nodes_path, edges_path))
}
