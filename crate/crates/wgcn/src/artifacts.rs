//! On-disk artifacts: word graphs and model checkpoints, each a binary blob
//! plus a JSON sidecar. Sidecars carry everything needed to reuse the
//! artifact (vocabulary, provenance, hyperparameters) and hashes to reject
//! mismatched inputs at predict time. All writes are atomic
//! (temp file + rename) so interrupted runs never leave half-written files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wgcn_core::model::ModelParams;
use wgcn_core::wgraph::{WordGraph, WordGraphKind};
use wgcn_core::DenseMatrix;

use crate::corpus::{Vocabulary, Weighting};
use crate::error::{Error, Result};
use crate::matio;

pub const SCHEMA_VERSION: u32 = 1;

/// Write `bytes` to `path` via a sibling temp file and rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    let io = |e| Error::io(path, e);
    {
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// One hashed input file recorded in sidecars and manifests.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HashedInput {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

pub fn hashed_input(role: &str, path: &Path) -> Result<HashedInput> {
    Ok(HashedInput {
        role: role.to_string(),
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
    })
}

/// Sidecar metadata stored next to a serialized word graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphMeta {
    pub schema_version: u32,
    /// "pmi" | "npmi" | "citation_lifted"
    pub kind: String,
    pub lift_order: Option<usize>,
    pub propagation_order: usize,
    pub window_size: Option<usize>,
    pub threshold: Option<f64>,
    /// Weighting of the feature matrix the graph was built from (gram and
    /// citation variants).
    pub build_weighting: Option<Weighting>,
    pub min_freq: u32,
    pub vocab: Vec<String>,
    pub doc_freq: Vec<u32>,
    pub total_train_docs: usize,
    pub dataset: Vec<HashedInput>,
}

impl GraphMeta {
    pub fn kind(&self) -> Result<WordGraphKind> {
        match self.kind.as_str() {
            "pmi" => Ok(WordGraphKind::Pmi),
            "npmi" => Ok(WordGraphKind::Npmi),
            "citation_lifted" => Ok(WordGraphKind::CitationLifted {
                order: self.lift_order.unwrap_or(0),
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown graph kind `{other}`"
            ))),
        }
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        Vocabulary::from_parts(
            self.vocab.clone(),
            self.doc_freq.clone(),
            self.total_train_docs,
        )
    }
}

pub fn kind_label(kind: WordGraphKind) -> (&'static str, Option<usize>) {
    match kind {
        WordGraphKind::Pmi => ("pmi", None),
        WordGraphKind::Npmi => ("npmi", None),
        WordGraphKind::CitationLifted { order } => ("citation_lifted", Some(order)),
    }
}

pub fn sidecar_path(bin_path: &Path) -> PathBuf {
    bin_path.with_extension("json")
}

/// A word graph together with its sidecar.
pub struct GraphArtifact {
    pub graph: WordGraph,
    pub meta: GraphMeta,
}

pub fn save_graph(bin_path: &Path, graph: &WordGraph, meta: &GraphMeta) -> Result<()> {
    let mut buf = Vec::new();
    matio::write_sparse(&mut buf, graph.adjacency()).map_err(|e| Error::io(bin_path, e))?;
    atomic_write(bin_path, &buf)?;
    let json = serde_json::to_vec_pretty(meta)?;
    atomic_write(&sidecar_path(bin_path), &json)
}

pub fn load_graph(bin_path: &Path) -> Result<GraphArtifact> {
    let adjacency = matio::load_sparse(bin_path)?;
    let sidecar = sidecar_path(bin_path);
    let meta: GraphMeta =
        serde_json::from_slice(&fs::read(&sidecar).map_err(|e| Error::io(&sidecar, e))?)?;
    if meta.vocab.len() != adjacency.rows() {
        return Err(Error::format(
            bin_path,
            format!(
                "sidecar vocabulary has {} tokens but the adjacency is {}x{}",
                meta.vocab.len(),
                adjacency.rows(),
                adjacency.cols()
            ),
        ));
    }
    let graph = WordGraph::from_parts(adjacency, meta.kind()?, meta.propagation_order)
        .map_err(Error::Core)?;
    Ok(GraphArtifact { graph, meta })
}

/// Joint digest of the graph binary and its sidecar; what checkpoints pin.
pub fn graph_hash(bin_path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(fs::read(bin_path).map_err(|e| Error::io(bin_path, e))?);
    let sidecar = sidecar_path(bin_path);
    hasher.update(fs::read(&sidecar).map_err(|e| Error::io(&sidecar, e))?);
    Ok(hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Serializable mirror of the core training configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    pub early_stop_patience: Option<usize>,
    pub propagation_order: usize,
    pub hidden_dim: usize,
    /// "identity" | "relu"
    pub activation: String,
    pub seed: u64,
}

impl TrainSettings {
    pub fn from_config(config: &wgcn_core::model::TrainConfig) -> Self {
        TrainSettings {
            learning_rate: config.learning_rate,
            dropout_rate: config.dropout_rate,
            weight_decay: config.weight_decay,
            max_epochs: config.max_epochs,
            early_stop_patience: config.early_stop_patience,
            propagation_order: config.propagation_order,
            hidden_dim: config.hidden_dim,
            activation: match config.activation {
                wgcn_core::model::Activation::Identity => "identity".into(),
                wgcn_core::model::Activation::Relu => "relu".into(),
            },
            seed: config.seed,
        }
    }

    pub fn to_config(&self) -> Result<wgcn_core::model::TrainConfig> {
        let activation = match self.activation.as_str() {
            "identity" => wgcn_core::model::Activation::Identity,
            "relu" => wgcn_core::model::Activation::Relu,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown activation `{other}`"
                )))
            }
        };
        Ok(wgcn_core::model::TrainConfig {
            learning_rate: self.learning_rate,
            dropout_rate: self.dropout_rate,
            weight_decay: self.weight_decay,
            max_epochs: self.max_epochs,
            early_stop_patience: self.early_stop_patience,
            propagation_order: self.propagation_order,
            hidden_dim: self.hidden_dim,
            activation,
            seed: self.seed,
        })
    }
}

/// Sidecar metadata stored next to a parameter dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub schema_version: u32,
    pub config: TrainSettings,
    pub graph_hash: String,
    pub label_names: Vec<String>,
    pub num_classes: usize,
    pub vocab_size: usize,
    /// Weighting the classifier features were built with.
    pub weighting: Weighting,
    pub best_epoch: usize,
}

const CKPT_MAGIC: &[u8; 4] = b"WGCP";

fn write_dense(buf: &mut Vec<u8>, m: &DenseMatrix) {
    buf.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for &v in m.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
    origin: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.bytes.len() {
            return Err(Error::format(self.origin, "truncated checkpoint"));
        }
        let out = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n * 8)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn dense(&mut self) -> Result<DenseMatrix> {
        let rows = self.u64()? as usize;
        let cols = self.u64()? as usize;
        let values = self.f64s(rows * cols)?;
        DenseMatrix::from_vec(rows, cols, values)
            .map_err(|e| Error::format(self.origin, e.to_string()))
    }
}

/// Binary parameter dump: magic `WGCP`, version u32, then `W0`, `W1`
/// (rows, cols, row-major values) and the bias vector, little-endian.
pub fn save_checkpoint(bin_path: &Path, params: &ModelParams, meta: &CheckpointMeta) -> Result<()> {
    let mut buf = Vec::new();
    buf.extend_from_slice(CKPT_MAGIC);
    buf.extend_from_slice(&SCHEMA_VERSION.to_le_bytes());
    write_dense(&mut buf, &params.w0);
    write_dense(&mut buf, &params.w1);
    buf.extend_from_slice(&(params.b1.len() as u64).to_le_bytes());
    for &v in &params.b1 {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    atomic_write(bin_path, &buf)?;
    let json = serde_json::to_vec_pretty(meta)?;
    atomic_write(&sidecar_path(bin_path), &json)
}

pub fn load_checkpoint(bin_path: &Path) -> Result<(ModelParams, CheckpointMeta)> {
    let bytes = fs::read(bin_path).map_err(|e| Error::io(bin_path, e))?;
    let mut cur = Cursor {
        bytes: &bytes,
        at: 0,
        origin: bin_path,
    };
    if cur.take(4)? != CKPT_MAGIC {
        return Err(Error::format(bin_path, "not a WGCP checkpoint"));
    }
    let version = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
    if version != SCHEMA_VERSION {
        return Err(Error::format(
            bin_path,
            format!("unsupported version {version}"),
        ));
    }
    let w0 = cur.dense()?;
    let w1 = cur.dense()?;
    let b_len = cur.u64()? as usize;
    let b1 = cur.f64s(b_len)?;
    let hidden_dim = w0.cols();
    let params = ModelParams {
        w0,
        w1,
        b1,
        hidden_dim,
    };

    let sidecar = sidecar_path(bin_path);
    let meta: CheckpointMeta =
        serde_json::from_slice(&fs::read(&sidecar).map_err(|e| Error::io(&sidecar, e))?)?;
    if params.vocab_size() != meta.vocab_size || params.num_classes() != meta.num_classes {
        return Err(Error::format(
            bin_path,
            "checkpoint shapes disagree with sidecar metadata",
        ));
    }
    Ok((params, meta))
}
