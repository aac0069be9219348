//! The word-grounded classifier: propagate word representations over the
//! word graph, project documents onto them, and classify with a single
//! softmax head.
//!
//! The forward map is `H_vm = act(A^n W0)`, `H_dm = X H_vm`,
//! `Y = softmax(relu(H_dm) W1 + b1)`; the word-feature matrix is the
//! identity and is never materialized. Gradients are hand-derived in
//! [`backward`], optimization is plain Adam, and training is full-batch
//! with dev-accuracy early stopping.

mod adam;
mod backward;
mod linearized;
mod train;

pub use adam::{adam_step, AdamState};
pub use backward::{loss_and_gradients, Gradients};
pub use linearized::{linearized_document_forward, LinearizedMode};
pub use train::{train, EpochRecord, TrainData, TrainOutcome, Trainer};

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fmath;
use crate::rng::Rng;
use crate::sparse::{spmm, SparseMatrix};
use crate::wgraph::WordGraph;

/// Activation applied once after the `n` propagation steps. The classifier
/// head always applies ReLU regardless of this choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
        }
    }
}

/// All training hyperparameters. Defaults are the best-reported text
/// classification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    /// Stop after this many epochs without a dev-accuracy improvement;
    /// `None` disables early stopping.
    pub early_stop_patience: Option<usize>,
    /// Number of propagation steps `n` over the word graph.
    pub propagation_order: usize,
    pub hidden_dim: usize,
    pub activation: Activation,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.018,
            dropout_rate: 0.6,
            weight_decay: 5e-5,
            max_epochs: 800,
            early_stop_patience: Some(10),
            propagation_order: 1,
            hidden_dim: 200,
            activation: Activation::Identity,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(
                "learning_rate must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidArgument(
                "dropout_rate must lie in [0, 1)".into(),
            ));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::InvalidArgument(
                "weight_decay must be non-negative".into(),
            ));
        }
        if self.hidden_dim == 0 {
            return Err(Error::InvalidArgument("hidden_dim must be positive".into()));
        }
        if self.early_stop_patience == Some(0) {
            return Err(Error::InvalidArgument(
                "early_stop_patience must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Learnable parameters: word projection `W0`, head weights `W1`, head bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub hidden_dim: usize,
}

impl ModelParams {
    /// Glorot-uniform initialization for the weight matrices, zero bias.
    pub fn init(vocab_size: usize, hidden_dim: usize, num_classes: usize, rng: &mut Rng) -> Self {
        let glorot = |rows: usize, cols: usize, rng: &mut Rng| {
            let limit = fmath::sqrt(6.0 / (rows + cols) as f64);
            let values = (0..rows * cols)
                .map(|_| rng.uniform_in(-limit, limit))
                .collect();
            DenseMatrix::from_vec(rows, cols, values).expect("sized buffer")
        };
        ModelParams {
            w0: glorot(vocab_size, hidden_dim, rng),
            w1: glorot(hidden_dim, num_classes, rng),
            b1: vec![0.0; num_classes],
            hidden_dim,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.w0.rows()
    }

    pub fn num_classes(&self) -> usize {
        self.w1.cols()
    }

    fn check_consistent(&self) -> Result<()> {
        if self.w0.cols() != self.hidden_dim
            || self.w1.rows() != self.hidden_dim
            || self.b1.len() != self.w1.cols()
        {
            return Err(Error::InvalidArgument(
                "parameter shapes are inconsistent".into(),
            ));
        }
        Ok(())
    }
}

/// `A^n W0` with no activation; `n = 0` is a copy of `w0`.
pub(crate) fn propagate_raw(graph: &WordGraph, w0: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    if graph.vocab_size() != w0.rows() {
        return Err(Error::DimensionMismatch {
            op: "propagate_words",
            left: (graph.vocab_size(), graph.vocab_size()),
            right: (w0.rows(), w0.cols()),
        });
    }
    let mut h = w0.clone();
    for _ in 0..n {
        h = spmm(graph.adjacency(), &h)?;
    }
    Ok(h)
}

/// Word representations `H_vm = act(A^n W0)`: `n` propagation steps over the
/// word graph, then the activation exactly once.
pub fn propagate_words(
    graph: &WordGraph,
    w0: &DenseMatrix,
    n: usize,
    activation: Activation,
) -> Result<DenseMatrix> {
    let h = propagate_raw(graph, w0, n)?;
    Ok(match activation {
        Activation::Identity => h,
        Activation::Relu => h.map(|x| activation.apply(x)),
    })
}

/// Everything the forward pass yields for a document batch.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Document representations `X H_vm`.
    pub h_dm: DenseMatrix,
    /// Pre-softmax scores `relu(H_dm) W1 + b1`.
    pub logits: DenseMatrix,
    /// Row-stochastic class probabilities.
    pub probs: DenseMatrix,
}

/// Project a document batch onto word representations and classify.
///
/// Documents are arbitrary rows over the training vocabulary; they need not
/// have been part of graph construction.
pub fn forward(x: &SparseMatrix, h_vm: &DenseMatrix, params: &ModelParams) -> Result<ForwardPass> {
    params.check_consistent()?;
    if x.cols() != h_vm.rows() || h_vm.cols() != params.w1.rows() {
        return Err(Error::DimensionMismatch {
            op: "forward",
            left: (x.rows(), x.cols()),
            right: (h_vm.rows(), h_vm.cols()),
        });
    }
    let h_dm = spmm(x, h_vm)?;
    let a1 = h_dm.map(|v| if v > 0.0 { v } else { 0.0 });
    let mut logits = a1.matmul(&params.w1)?;
    for r in 0..logits.rows() {
        for (l, &b) in logits.row_mut(r).iter_mut().zip(&params.b1) {
            *l += b;
        }
    }
    let probs = softmax_rows(&logits);
    Ok(ForwardPass {
        h_dm,
        logits,
        probs,
    })
}

/// Row-wise softmax with max-subtraction stabilization.
pub(crate) fn softmax_rows(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = fmath::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Row-wise argmax; ties break to the lowest class index.
pub(crate) fn argmax_rows(probs: &DenseMatrix) -> Vec<usize> {
    (0..probs.rows())
        .map(|r| {
            let row = probs.row(r);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Class indices for a document batch. No dropout is applied; this is the
/// inductive inference path and accepts documents unseen at graph time.
pub fn predict(
    x: &SparseMatrix,
    graph: &WordGraph,
    params: &ModelParams,
    config: &TrainConfig,
) -> Result<Vec<usize>> {
    let h_vm = propagate_words(
        graph,
        &params.w0,
        config.propagation_order,
        config.activation,
    )?;
    let fwd = forward(x, &h_vm, params)?;
    Ok(argmax_rows(&fwd.probs))
}

/// Inverted-dropout mask over the `v x m` word representations: entries are
/// either 0 or `1 / (1 - rate)`.
pub(crate) fn dropout_mask(len: usize, rate: f64, rng: &mut Rng) -> Vec<f64> {
    let keep_scale = 1.0 / (1.0 - rate);
    (0..len)
        .map(|_| {
            if rng.uniform() < rate {
                0.0
            } else {
                keep_scale
            }
        })
        .collect()
}
