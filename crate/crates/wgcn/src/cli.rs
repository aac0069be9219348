//! Command-line interface: graph building, training, prediction, sweeps,
//! benchmarks, and dataset statistics.
//!
//! Option precedence everywhere is CLI flags over the config file over
//! built-in defaults. Built-in defaults are the best-reported settings:
//! hidden 200, dropout 0.6, learning rate 0.018, window 20, weight decay
//! 5e-5, patience 10, 800 epochs for text runs; 1000 epochs and no early
//! stop for citation runs.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use wgcn_core::model::{predict, train, Activation, TrainConfig};
use wgcn_core::wgraph::{
    build_citation_lifted_graph, build_cooccurrence_gram_graph, build_pmi_graph, count_windows,
    PmiVariant, WordGraph, WordGraphKind,
};

use crate::artifacts::{
    self, graph_hash, hashed_input, load_checkpoint, load_graph, save_checkpoint, save_graph,
    CheckpointMeta, GraphArtifact, GraphMeta, HashedInput, TrainSettings, SCHEMA_VERSION,
};
use crate::corpus::{
    apply_weighting, carve_dev, featurize, ingest_citation_dataset, ingest_text_corpus,
    select_rows, tokenize, train_data, CitationCorpus, IngestOptions, IngestStats, TextCorpus,
    Weighting,
};
use crate::error::{Error, Result};
use crate::eval::{
    accuracy, order_sweep, precision_recall, sweep_to_csv, timing_harness, CSV_SCHEMA_VERSION,
};
use crate::manifest::{create_run_dir, write_manifest, RunManifest};

#[derive(Parser)]
#[command(
    name = "wgcn",
    about = "Inductive text classification over a word-level graph",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a word graph from a dataset and serialize it with its sidecar.
    BuildGraph(BuildGraphArgs),
    /// Train a classifier against a prebuilt graph.
    Train(TrainArgs),
    /// Label documents with a trained checkpoint.
    Predict(PredictArgs),
    /// Sweep one axis (hidden-dim, window-size, order) with repeated runs.
    Sweep(SweepArgs),
    /// Measure per-epoch wall time and allocator peak.
    Bench(BenchArgs),
    /// Dataset utilities.
    #[command(subcommand)]
    Dataset(DatasetCommand),
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Print document/vocabulary/split counts.
    Stats(DatasetArgs),
}

/// Dataset file arguments: a text corpus (`--docs` + `--meta`) or a citation
/// dataset (`--nodes` + `--edges`).
#[derive(Args, Clone)]
struct DatasetArgs {
    /// Text corpus: one whitespace-tokenized document per line.
    #[arg(long, requires = "meta")]
    docs: Option<PathBuf>,
    /// Metadata for --docs: `id<TAB>split<TAB>label` per line.
    #[arg(long, requires = "docs")]
    meta: Option<PathBuf>,
    /// Citation dataset nodes: `id<TAB>split<TAB>label<TAB>tokens`.
    #[arg(long, requires = "edges", conflicts_with = "docs")]
    nodes: Option<PathBuf>,
    /// Citation dataset edges: `id<TAB>id` per line.
    #[arg(long, requires = "nodes")]
    edges: Option<PathBuf>,
}

enum Dataset {
    Text(TextCorpus),
    Citation(CitationCorpus),
}

impl Dataset {
    fn corpus(&self) -> &TextCorpus {
        match self {
            Dataset::Text(c) => c,
            Dataset::Citation(c) => &c.corpus,
        }
    }

    fn is_citation(&self) -> bool {
        matches!(self, Dataset::Citation(_))
    }
}

impl DatasetArgs {
    fn load(&self, min_freq: u32) -> Result<(Dataset, Vec<HashedInput>)> {
        match (&self.docs, &self.meta, &self.nodes, &self.edges) {
            (Some(docs), Some(meta), None, None) => {
                let corpus = ingest_text_corpus(docs, meta, &IngestOptions { min_freq })?;
                let inputs = vec![hashed_input("docs", docs)?, hashed_input("meta", meta)?];
                Ok((Dataset::Text(corpus), inputs))
            }
            (None, None, Some(nodes), Some(edges)) => {
                let corpus = ingest_citation_dataset(nodes, edges)?;
                let inputs = vec![hashed_input("nodes", nodes)?, hashed_input("edges", edges)?];
                Ok((Dataset::Citation(corpus), inputs))
            }
            _ => Err(Error::InvalidArgument(
                "provide either --docs/--meta or --nodes/--edges".into(),
            )),
        }
    }
}

/// Optional config file (TOML): `[graph]`, `[train]`, and `[run]` tables
/// mirroring the corresponding flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    graph: GraphFileConfig,
    #[serde(default)]
    train: TrainFileConfig,
    #[serde(default)]
    run: RunFileConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFileConfig {
    variant: Option<String>,
    window: Option<usize>,
    threshold: Option<f64>,
    min_freq: Option<u32>,
    lift_order: Option<usize>,
    build_weighting: Option<String>,
    lift_rows: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainFileConfig {
    learning_rate: Option<f64>,
    dropout_rate: Option<f64>,
    weight_decay: Option<f64>,
    max_epochs: Option<usize>,
    early_stop_patience: Option<usize>,
    propagation_order: Option<usize>,
    hidden_dim: Option<usize>,
    activation: Option<String>,
    seed: Option<u64>,
    weighting: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFileConfig {
    root: Option<PathBuf>,
    trials: Option<usize>,
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn parse_weighting(s: &str) -> Result<Weighting> {
    s.parse().map_err(Error::Config)
}

fn parse_activation(s: &str) -> Result<Activation> {
    match s {
        "identity" => Ok(Activation::Identity),
        "relu" => Ok(Activation::Relu),
        other => Err(Error::Config(format!("unknown activation `{other}`"))),
    }
}

/// Shared training flags.
#[derive(Args, Clone)]
struct TrainFlags {
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    /// Early-stop patience in epochs.
    #[arg(long, conflicts_with = "no_early_stop")]
    patience: Option<usize>,
    /// Disable early stopping entirely.
    #[arg(long)]
    no_early_stop: bool,
    /// Number of propagation steps over the word graph.
    #[arg(long)]
    propagation_order: Option<usize>,
    #[arg(long)]
    hidden_dim: Option<usize>,
    /// Activation after propagation: identity (default) or relu.
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Classifier feature weighting: count, tf, or tfidf-l1 (default).
    #[arg(long)]
    weighting: Option<String>,
    /// Run directory root (also WGCN_RUN_ROOT; default ./runs).
    #[arg(long)]
    out_root: Option<PathBuf>,
}

struct ResolvedTrain {
    config: TrainConfig,
    weighting: Weighting,
    out_root: PathBuf,
    trials: usize,
}

impl TrainFlags {
    fn resolve(&self, file: &FileConfig, citation: bool) -> Result<ResolvedTrain> {
        let t = &file.train;
        let default_max_epochs = if citation { 1000 } else { 800 };
        let patience = if self.no_early_stop {
            None
        } else if let Some(p) = self.patience.or(t.early_stop_patience) {
            Some(p)
        } else if citation {
            None
        } else {
            Some(10)
        };
        let activation = match self.activation.as_deref().or(t.activation.as_deref()) {
            Some(s) => parse_activation(s)?,
            None => Activation::Identity,
        };
        let config = TrainConfig {
            learning_rate: self.learning_rate.or(t.learning_rate).unwrap_or(0.018),
            dropout_rate: self.dropout.or(t.dropout_rate).unwrap_or(0.6),
            weight_decay: self.weight_decay.or(t.weight_decay).unwrap_or(5e-5),
            max_epochs: self
                .max_epochs
                .or(t.max_epochs)
                .unwrap_or(default_max_epochs),
            early_stop_patience: patience,
            propagation_order: self.propagation_order.or(t.propagation_order).unwrap_or(1),
            hidden_dim: self.hidden_dim.or(t.hidden_dim).unwrap_or(200),
            activation,
            seed: self.seed.or(t.seed).unwrap_or(42),
        };
        config.validate()?;
        let weighting = match self.weighting.as_deref().or(t.weighting.as_deref()) {
            Some(s) => parse_weighting(s)?,
            None => Weighting::TfidfL1,
        };
        let out_root = self
            .out_root
            .clone()
            .or_else(|| file.run.root.clone())
            .or_else(|| std::env::var_os("WGCN_RUN_ROOT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("runs"));
        Ok(ResolvedTrain {
            config,
            weighting,
            out_root,
            trials: file.run.trials.unwrap_or(10),
        })
    }
}

/// Graph construction flags.
#[derive(Args, Clone)]
struct GraphFlags {
    /// Graph variant: npmi (default for text), pmi, gram, or citation
    /// (default when --nodes is given).
    #[arg(long)]
    variant: Option<String>,
    /// Sliding window size for PMI counting.
    #[arg(long)]
    window: Option<usize>,
    /// Association threshold; edges need a strictly greater value.
    #[arg(long)]
    threshold: Option<f64>,
    /// Document-frequency cutoff for the vocabulary (text corpora).
    #[arg(long)]
    min_freq: Option<u32>,
    /// Citation lift order k.
    #[arg(long)]
    order: Option<usize>,
    /// Weighting of the feature matrix behind gram/citation graphs.
    #[arg(long)]
    build_weighting: Option<String>,
    /// Rows of X used for the citation lift: all (default) or train.
    #[arg(long)]
    lift_rows: Option<String>,
}

struct ResolvedGraph {
    variant: String,
    window: usize,
    threshold: f64,
    min_freq: u32,
    lift_order: usize,
    build_weighting: Weighting,
    lift_rows_train_only: bool,
}

impl GraphFlags {
    fn resolve(&self, file: &FileConfig, citation_dataset: bool) -> Result<ResolvedGraph> {
        let g = &file.graph;
        let variant = self
            .variant
            .clone()
            .or_else(|| g.variant.clone())
            .unwrap_or_else(|| {
                if citation_dataset {
                    "citation".to_string()
                } else {
                    "npmi".to_string()
                }
            });
        if !matches!(variant.as_str(), "npmi" | "pmi" | "gram" | "citation") {
            return Err(Error::Config(format!("unknown graph variant `{variant}`")));
        }
        let build_weighting = match self
            .build_weighting
            .as_deref()
            .or(g.build_weighting.as_deref())
        {
            Some(s) => parse_weighting(s)?,
            None => Weighting::Count,
        };
        // Citation datasets expose features for every node, so graph
        // construction defaults to all rows of X there; text corpora use the
        // training split only.
        let lift_rows = self
            .lift_rows
            .clone()
            .or_else(|| g.lift_rows.clone())
            .unwrap_or_else(|| {
                if citation_dataset {
                    "all".to_string()
                } else {
                    "train".to_string()
                }
            });
        let lift_rows_train_only = match lift_rows.as_str() {
            "all" => false,
            "train" => true,
            other => {
                return Err(Error::Config(format!(
                    "lift_rows must be `all` or `train`, got `{other}`"
                )))
            }
        };
        Ok(ResolvedGraph {
            variant,
            window: self.window.or(g.window).unwrap_or(20),
            threshold: self.threshold.or(g.threshold).unwrap_or(0.0),
            min_freq: self.min_freq.or(g.min_freq).unwrap_or(5),
            lift_order: self.order.or(g.lift_order).unwrap_or(1),
            build_weighting,
            lift_rows_train_only,
        })
    }
}

#[derive(Args)]
struct BuildGraphArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    graph: GraphFlags,
    /// TOML config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path for the graph binary; the JSON sidecar sits next to it.
    #[arg(long)]
    out: PathBuf,
}

/// Build the word graph for an already ingested dataset.
fn build_graph_for(
    dataset: &Dataset,
    resolved: &ResolvedGraph,
    lift_order: usize,
    window: usize,
) -> Result<WordGraph> {
    let corpus = dataset.corpus();
    match resolved.variant.as_str() {
        "npmi" | "pmi" => {
            let variant = if resolved.variant == "npmi" {
                PmiVariant::Npmi
            } else {
                PmiVariant::Pmi
            };
            let stats = count_windows(&corpus.train_token_ids(), corpus.vocabulary.len(), window)?;
            Ok(build_pmi_graph(&stats, variant, resolved.threshold)?)
        }
        "gram" => {
            let x = apply_weighting(
                &corpus.features,
                resolved.build_weighting,
                &corpus.vocabulary,
            );
            let x_rows = if resolved.lift_rows_train_only {
                select_rows(&x.matrix, &corpus.split.train_ids)
            } else {
                x.matrix.clone()
            };
            Ok(build_cooccurrence_gram_graph(&x_rows)?)
        }
        "citation" => {
            let citation = match dataset {
                Dataset::Citation(c) => c,
                Dataset::Text(_) => {
                    return Err(Error::InvalidArgument(
                        "citation graphs need --nodes/--edges".into(),
                    ))
                }
            };
            let x = apply_weighting(
                &corpus.features,
                resolved.build_weighting,
                &corpus.vocabulary,
            );
            let x_rows = if resolved.lift_rows_train_only {
                select_rows(&x.matrix, &corpus.split.train_ids)
            } else {
                x.matrix.clone()
            };
            if resolved.lift_rows_train_only {
                // The citation adjacency must match the selected rows.
                let sub = select_submatrix(citation.graph.adjacency(), &corpus.split.train_ids);
                Ok(build_citation_lifted_graph(&x_rows, &sub, lift_order)?)
            } else {
                Ok(build_citation_lifted_graph(
                    &x_rows,
                    citation.graph.adjacency(),
                    lift_order,
                )?)
            }
        }
        other => Err(Error::Config(format!("unknown graph variant `{other}`"))),
    }
}

/// Square submatrix of rows/cols selected by `ids`.
fn select_submatrix(m: &wgcn_core::SparseMatrix, ids: &[usize]) -> wgcn_core::SparseMatrix {
    let position: std::collections::HashMap<usize, usize> =
        ids.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut entries = Vec::new();
    for (out_row, &src) in ids.iter().enumerate() {
        let (cols, vals) = m.row(src);
        for (&c, &v) in cols.iter().zip(vals) {
            if let Some(&out_col) = position.get(&c) {
                entries.push((out_row, out_col, v));
            }
        }
    }
    wgcn_core::SparseMatrix::from_triplets(ids.len(), ids.len(), &entries)
        .expect("in-range triplets")
}

fn graph_meta_for(
    graph: &WordGraph,
    dataset: &Dataset,
    resolved: &ResolvedGraph,
    inputs: Vec<HashedInput>,
) -> GraphMeta {
    let corpus = dataset.corpus();
    let (kind, lift_order) = artifacts::kind_label(graph.kind());
    let pmi_like = matches!(graph.kind(), WordGraphKind::Pmi | WordGraphKind::Npmi);
    GraphMeta {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        lift_order,
        propagation_order: graph.propagation_order(),
        window_size: pmi_like.then_some(resolved.window),
        threshold: pmi_like.then_some(resolved.threshold),
        build_weighting: (!pmi_like).then_some(resolved.build_weighting),
        min_freq: if dataset.is_citation() {
            1
        } else {
            resolved.min_freq
        },
        vocab: corpus.vocabulary.tokens().to_vec(),
        doc_freq: corpus.vocabulary.doc_freq().to_vec(),
        total_train_docs: corpus.vocabulary.total_docs(),
        dataset: inputs,
    }
}

fn cmd_build_graph(args: &BuildGraphArgs) -> Result<()> {
    let file = load_file_config(&args.config)?;
    let citation_dataset = args.dataset.nodes.is_some();
    let resolved = args.graph.resolve(&file, citation_dataset)?;
    let (dataset, inputs) = args.dataset.load(resolved.min_freq)?;
    let graph = build_graph_for(&dataset, &resolved, resolved.lift_order, resolved.window)?;
    let meta = graph_meta_for(&graph, &dataset, &resolved, inputs);
    save_graph(&args.out, &graph, &meta)?;

    let v = graph.vocab_size();
    let adj = graph.adjacency();
    let diagonal = (0..v).filter(|&i| adj.get(i, i) != 0.0).count();
    let edges = (adj.nnz() - diagonal) / 2;
    let density = adj.nnz() as f64 / (v as f64 * v as f64);
    println!(
        "graph: {} vocab={} edges={} density={:.6} -> {}",
        resolved.variant,
        v,
        edges,
        density,
        args.out.display()
    );
    Ok(())
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Graph binary produced by build-graph.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    flags: TrainFlags,
}

/// Dataset featurized against a graph's recorded vocabulary, with labels and
/// splits; the classifier-side weighting already applied.
struct PreparedData {
    data: wgcn_core::model::TrainData,
    x_test: wgcn_core::SparseMatrix,
    y_test: Vec<usize>,
    label_names: Vec<String>,
    stats: IngestStats,
    num_classes: usize,
}

fn prepare(
    dataset: &Dataset,
    artifact: &GraphArtifact,
    weighting: Weighting,
    seed: u64,
) -> Result<PreparedData> {
    let corpus = dataset.corpus();
    let vocabulary = artifact.meta.vocabulary()?;
    let mut stats = IngestStats::default();
    let docs: Vec<Vec<String>> = corpus
        .token_ids
        .iter()
        .map(|ids| {
            ids.iter()
                .map(|&i| corpus.vocabulary.token(i).to_string())
                .collect()
        })
        .collect();
    let (matrix, _) = featurize(&docs, &vocabulary, &mut stats);
    let counts = crate::corpus::FeatureMatrix {
        matrix,
        weighting: Weighting::Count,
    };
    let features = apply_weighting(&counts, weighting, &vocabulary);
    let split = carve_dev(&corpus.split, 0.1, seed);
    let data = train_data(&features, &split);
    data.validate().map_err(Error::Core)?;
    Ok(PreparedData {
        data,
        x_test: select_rows(&features.matrix, &split.test_ids),
        y_test: split.test_ids.iter().map(|&i| split.labels[i]).collect(),
        label_names: split.label_names.clone(),
        stats,
        num_classes: split.num_classes,
    })
}

fn verify_graph_dataset_hashes(meta: &GraphMeta) -> Result<()> {
    crate::manifest::verify_inputs(&meta.dataset)
}

fn history_csv(history: &[wgcn_core::model::EpochRecord]) -> String {
    let mut out = String::from("schema_version,epoch,loss,dev_accuracy\n");
    for rec in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            CSV_SCHEMA_VERSION, rec.epoch, rec.loss, rec.dev_accuracy
        ));
    }
    out
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let file = load_file_config(&args.flags.config)?;
    let citation_dataset = args.dataset.nodes.is_some();
    let resolved = args.flags.resolve(&file, citation_dataset)?;

    let artifact = load_graph(&args.graph)?;
    verify_graph_dataset_hashes(&artifact.meta)?;
    let (dataset, mut inputs) = args.dataset.load(artifact.meta.min_freq)?;
    inputs.push(hashed_input("graph", &args.graph)?);
    inputs.push(hashed_input(
        "graph_sidecar",
        &artifacts::sidecar_path(&args.graph),
    )?);

    let prepared = prepare(
        &dataset,
        &artifact,
        resolved.weighting,
        resolved.config.seed,
    )?;
    // Ingestion drops dataset-level OOV tokens; prepare drops anything the
    // graph vocabulary additionally excludes.
    let oov = dataset.corpus().stats.oov_occurrences + prepared.stats.oov_occurrences;
    if oov > 0 || prepared.stats.empty_docs > 0 {
        eprintln!(
            "warning: {} out-of-vocabulary occurrences dropped, {} empty documents",
            oov, prepared.stats.empty_docs
        );
    }

    let started = std::time::Instant::now();
    let outcome = train(&prepared.data, &artifact.graph, &resolved.config)?;
    let train_ms = started.elapsed().as_secs_f64() * 1e3;

    let predictions = predict(
        &prepared.x_test,
        &artifact.graph,
        &outcome.params,
        &resolved.config,
    )?;
    let test_accuracy = if prepared.y_test.is_empty() {
        f64::NAN
    } else {
        accuracy(&predictions, &prepared.y_test)?
    };
    let (precision, recall) =
        precision_recall(&predictions, &prepared.y_test, prepared.num_classes);

    let run_dir = create_run_dir(&resolved.out_root, "train")?;
    let ckpt_meta = CheckpointMeta {
        schema_version: SCHEMA_VERSION,
        config: TrainSettings::from_config(&resolved.config),
        graph_hash: graph_hash(&args.graph)?,
        label_names: prepared.label_names.clone(),
        num_classes: prepared.num_classes,
        vocab_size: artifact.graph.vocab_size(),
        weighting: resolved.weighting,
        best_epoch: outcome.best_epoch,
    };
    save_checkpoint(&run_dir.join("checkpoint.bin"), &outcome.params, &ckpt_meta)?;
    artifacts::atomic_write(
        &run_dir.join("history.csv"),
        history_csv(&outcome.history).as_bytes(),
    )?;

    let epochs = outcome.history.len();
    let report = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "test_accuracy": test_accuracy,
        "per_class_precision": precision,
        "per_class_recall": recall,
        "epochs_run": epochs,
        "best_epoch": outcome.best_epoch,
        "best_dev_accuracy": outcome.best_dev_accuracy,
        "wall_time_per_epoch_ms": if epochs > 0 { train_ms / epochs as f64 } else { train_ms },
        "peak_memory_bytes": crate::alloc_track::peak_bytes(),
        "hardware": crate::eval::hardware_descriptor(),
    });
    artifacts::atomic_write(
        &run_dir.join("report.json"),
        &serde_json::to_vec_pretty(&report)?,
    )?;

    let manifest = RunManifest::new(
        "train",
        serde_json::json!({
            "train": TrainSettings::from_config(&resolved.config),
            "weighting": resolved.weighting,
        }),
        inputs,
        resolved.config.seed,
        &[
            "checkpoint.bin",
            "checkpoint.json",
            "history.csv",
            "report.json",
        ],
    );
    write_manifest(&run_dir, &manifest)?;

    println!(
        "trained {} epochs (best dev {:.4} at epoch {}), test accuracy {:.4} -> {}",
        epochs,
        outcome.best_dev_accuracy,
        outcome.best_epoch,
        test_accuracy,
        run_dir.display()
    );
    Ok(())
}

#[derive(Args)]
struct PredictArgs {
    /// Checkpoint binary written by train.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Graph binary the checkpoint was trained against.
    #[arg(long)]
    graph: PathBuf,
    /// Documents to label: one per line.
    #[arg(long)]
    input: PathBuf,
    /// Output TSV (`id<TAB>label`); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let (params, meta) = load_checkpoint(&args.checkpoint)?;
    let found = graph_hash(&args.graph)?;
    if found != meta.graph_hash {
        return Err(Error::HashMismatch {
            path: args.graph.clone(),
            expected: meta.graph_hash.clone(),
            found,
        });
    }
    let artifact = load_graph(&args.graph)?;
    let vocabulary = artifact.meta.vocabulary()?;
    let text = fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let docs: Vec<Vec<String>> = text.lines().map(tokenize).collect();
    if docs.is_empty() {
        return Err(Error::InvalidArgument("no input documents".into()));
    }
    let mut stats = IngestStats::default();
    let (matrix, _) = featurize(&docs, &vocabulary, &mut stats);
    let counts = crate::corpus::FeatureMatrix {
        matrix,
        weighting: Weighting::Count,
    };
    let features = apply_weighting(&counts, meta.weighting, &vocabulary);
    let config = meta.config.to_config()?;
    let classes = predict(&features.matrix, &artifact.graph, &params, &config)?;

    let mut out = String::new();
    for (i, &class) in classes.iter().enumerate() {
        out.push_str(&format!("{i}\t{}\n", meta.label_names[class]));
    }
    match &args.out {
        Some(path) => artifacts::atomic_write(path, out.as_bytes())?,
        None => print!("{out}"),
    }
    eprintln!(
        "predicted {} documents ({} OOV occurrences dropped, {} all-OOV)",
        classes.len(),
        stats.oov_occurrences,
        stats.empty_docs
    );
    Ok(())
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Axis to sweep: hidden-dim, window-size, or order.
    #[arg(long)]
    axis: String,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<usize>,
    /// Trials per value.
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    graph_flags: GraphFlags,
    #[command(flatten)]
    flags: TrainFlags,
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    if args.values.is_empty() {
        return Err(Error::InvalidArgument("no --values to sweep".into()));
    }
    let file = load_file_config(&args.flags.config)?;
    let citation_dataset = args.dataset.nodes.is_some();
    let resolved = args.flags.resolve(&file, citation_dataset)?;
    let graph_resolved = args.graph_flags.resolve(&file, citation_dataset)?;
    let trials = args.trials.unwrap_or(resolved.trials);
    let (dataset, inputs) = args.dataset.load(graph_resolved.min_freq)?;

    // One prepared featurization per distinct graph; axis decides what varies.
    let base_graph = build_graph_for(
        &dataset,
        &graph_resolved,
        graph_resolved.lift_order,
        graph_resolved.window,
    )?;
    let meta = graph_meta_for(&base_graph, &dataset, &graph_resolved, inputs.clone());
    let prepare_for = |graph: &WordGraph| -> Result<PreparedData> {
        let artifact = GraphArtifact {
            graph: WordGraph::from_parts(
                graph.adjacency().clone(),
                graph.kind(),
                graph.propagation_order(),
            )
            .map_err(Error::Core)?,
            meta: meta.clone(),
        };
        prepare(
            &dataset,
            &artifact,
            resolved.weighting,
            resolved.config.seed,
        )
    };
    let prepared = prepare_for(&base_graph)?;

    let axis = args.axis.as_str();
    let rows = match axis {
        "hidden-dim" | "hidden_dim" => order_sweep(
            &prepared.data,
            &prepared.x_test,
            &prepared.y_test,
            &args.values,
            trials,
            |hidden| {
                let config = TrainConfig {
                    hidden_dim: hidden,
                    ..resolved.config.clone()
                };
                Ok((clone_graph(&base_graph)?, config))
            },
        )?,
        "order" => {
            if citation_dataset && graph_resolved.variant == "citation" {
                // Rebuild the lifted graph per order; model applies it once.
                order_sweep(
                    &prepared.data,
                    &prepared.x_test,
                    &prepared.y_test,
                    &args.values,
                    trials,
                    |k| {
                        let graph =
                            build_graph_for(&dataset, &graph_resolved, k, graph_resolved.window)?;
                        let config = TrainConfig {
                            propagation_order: 1,
                            ..resolved.config.clone()
                        };
                        Ok((graph, config))
                    },
                )?
            } else {
                order_sweep(
                    &prepared.data,
                    &prepared.x_test,
                    &prepared.y_test,
                    &args.values,
                    trials,
                    |n| {
                        let config = TrainConfig {
                            propagation_order: n,
                            ..resolved.config.clone()
                        };
                        Ok((clone_graph(&base_graph)?, config))
                    },
                )?
            }
        }
        "window-size" | "window_size" => order_sweep(
            &prepared.data,
            &prepared.x_test,
            &prepared.y_test,
            &args.values,
            trials,
            |window| {
                let graph =
                    build_graph_for(&dataset, &graph_resolved, graph_resolved.lift_order, window)?;
                Ok((graph, resolved.config.clone()))
            },
        )?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown sweep axis `{other}` (expected hidden-dim, window-size, or order)"
            )))
        }
    };

    let run_dir = create_run_dir(&resolved.out_root, "sweep")?;
    let csv = sweep_to_csv(axis, &rows);
    artifacts::atomic_write(&run_dir.join("sweep.csv"), csv.as_bytes())?;
    artifacts::atomic_write(
        &run_dir.join("trials.json"),
        &serde_json::to_vec_pretty(&serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "axis": axis,
            "trials": trials,
            "rows": rows,
        }))?,
    )?;
    let manifest = RunManifest::new(
        "sweep",
        serde_json::json!({
            "axis": axis,
            "values": args.values,
            "trials": trials,
            "train": TrainSettings::from_config(&resolved.config),
        }),
        inputs,
        resolved.config.seed,
        &["sweep.csv", "trials.json"],
    );
    write_manifest(&run_dir, &manifest)?;

    print!("{csv}");
    println!("sweep written to {}", run_dir.display());
    Ok(())
}

fn clone_graph(g: &WordGraph) -> Result<WordGraph> {
    WordGraph::from_parts(g.adjacency().clone(), g.kind(), g.propagation_order())
        .map_err(Error::Core)
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Graph binary produced by build-graph.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    flags: TrainFlags,
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let file = load_file_config(&args.flags.config)?;
    let citation_dataset = args.dataset.nodes.is_some();
    let resolved = args.flags.resolve(&file, citation_dataset)?;
    let artifact = load_graph(&args.graph)?;
    verify_graph_dataset_hashes(&artifact.meta)?;
    let (dataset, mut inputs) = args.dataset.load(artifact.meta.min_freq)?;
    inputs.push(hashed_input("graph", &args.graph)?);
    let prepared = prepare(
        &dataset,
        &artifact,
        resolved.weighting,
        resolved.config.seed,
    )?;

    let report = timing_harness(&resolved.config, &prepared.data, &artifact.graph)?;

    let run_dir = create_run_dir(&resolved.out_root, "bench")?;
    artifacts::atomic_write(
        &run_dir.join("bench.json"),
        &serde_json::to_vec_pretty(&serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "report": report,
        }))?,
    )?;
    let mut csv = String::from("schema_version,epoch,ms\n");
    for (i, ms) in report.epoch_ms.iter().enumerate() {
        csv.push_str(&format!("{CSV_SCHEMA_VERSION},{},{ms}\n", i + 1));
    }
    artifacts::atomic_write(&run_dir.join("bench.csv"), csv.as_bytes())?;
    let manifest = RunManifest::new(
        "bench",
        serde_json::json!({ "train": TrainSettings::from_config(&resolved.config) }),
        inputs,
        resolved.config.seed,
        &["bench.json", "bench.csv"],
    );
    write_manifest(&run_dir, &manifest)?;

    println!(
        "median epoch {:.3} ms over {} measured ({} warm-up), peak alloc {} bytes on {}",
        report.median_epoch_ms,
        report.measured_epochs,
        report.warmup_epochs,
        report.peak_memory_bytes,
        report.hardware
    );
    println!("bench written to {}", run_dir.display());
    Ok(())
}

fn cmd_dataset_stats(args: &DatasetArgs) -> Result<()> {
    let (dataset, _) = args.load(if args.nodes.is_some() { 1 } else { 5 })?;
    let corpus = dataset.corpus();
    let split = &corpus.split;
    let total_tokens: usize = corpus.token_ids.iter().map(Vec::len).sum();
    let avg_len = total_tokens as f64 / corpus.token_ids.len() as f64;
    match &dataset {
        Dataset::Text(_) => {
            println!("docs\ttrain\tdev\ttest\twords\tclasses\tavg_len");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.2}",
                corpus.token_ids.len(),
                split.train_ids.len(),
                split.dev_ids.len(),
                split.test_ids.len(),
                corpus.vocabulary.len(),
                split.num_classes,
                avg_len
            );
        }
        Dataset::Citation(c) => {
            let edges = c.graph.adjacency().nnz() / 2;
            println!("nodes\tedges\twords\tclasses\ttrain\tdev\ttest");
            println!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.graph.num_docs(),
                edges,
                corpus.vocabulary.len(),
                split.num_classes,
                split.train_ids.len(),
                split.dev_ids.len(),
                split.test_ids.len()
            );
        }
    }
    Ok(())
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::BuildGraph(args) => cmd_build_graph(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Dataset(DatasetCommand::Stats(args)) => cmd_dataset_stats(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
