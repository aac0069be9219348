//! Full-batch training loop with dev-accuracy early stopping.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sparse::SparseMatrix;
use crate::wgraph::WordGraph;

use super::adam::{adam_step, AdamState};
use super::backward::loss_and_gradients_masked;
use super::{argmax_rows, dropout_mask, forward, ModelParams, TrainConfig};

/// Feature rows and labels for the training and dev splits.
#[derive(Debug, Clone)]
pub struct TrainData {
    pub x_train: SparseMatrix,
    pub y_train: Vec<usize>,
    pub x_dev: SparseMatrix,
    pub y_dev: Vec<usize>,
    pub num_classes: usize,
}

impl TrainData {
    pub fn validate(&self) -> Result<()> {
        if self.x_train.rows() == 0 {
            return Err(Error::InvalidArgument("empty training split".into()));
        }
        if self.x_dev.rows() == 0 {
            return Err(Error::InvalidArgument("empty dev split".into()));
        }
        if self.x_train.rows() != self.y_train.len() || self.x_dev.rows() != self.y_dev.len() {
            return Err(Error::InvalidArgument(
                "label count does not match feature rows".into(),
            ));
        }
        if self.x_train.cols() != self.x_dev.cols() {
            return Err(Error::InvalidArgument(
                "train and dev vocabulary sizes differ".into(),
            ));
        }
        for &y in self.y_train.iter().chain(&self.y_dev) {
            if y >= self.num_classes {
                return Err(Error::LabelOutOfRange {
                    label: y,
                    num_classes: self.num_classes,
                });
            }
        }
        Ok(())
    }
}

/// One row of the training history.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    /// 1-based epoch number.
    pub epoch: usize,
    /// Training loss before this epoch's parameter update.
    pub loss: f64,
    /// Dev accuracy after the update.
    pub dev_accuracy: f64,
}

/// Trained parameters plus the per-epoch history.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the best-dev epoch (the initialization if no epoch ran).
    pub params: ModelParams,
    pub history: Vec<EpochRecord>,
    /// Epoch the returned parameters come from; 0 means the initialization.
    pub best_epoch: usize,
    pub best_dev_accuracy: f64,
}

fn fraction_correct(predictions: &[usize], labels: &[usize]) -> f64 {
    let correct = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p == y)
        .count();
    correct as f64 / labels.len() as f64
}

/// Steppable training state; [`train`] drives it to completion, the timing
/// harness steps it one epoch at a time.
pub struct Trainer<'a> {
    data: &'a TrainData,
    graph: &'a WordGraph,
    config: TrainConfig,
    params: ModelParams,
    adam: AdamState,
    rng: Rng,
    epochs_run: usize,
}

impl<'a> Trainer<'a> {
    pub fn new(data: &'a TrainData, graph: &'a WordGraph, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        data.validate()?;
        if data.x_train.cols() != graph.vocab_size() {
            return Err(Error::DimensionMismatch {
                op: "train",
                left: (data.x_train.rows(), data.x_train.cols()),
                right: (graph.vocab_size(), graph.vocab_size()),
            });
        }
        let mut rng = Rng::from_seed(config.seed);
        let params = ModelParams::init(
            graph.vocab_size(),
            config.hidden_dim,
            data.num_classes,
            &mut rng,
        );
        let adam = AdamState::new(&params);
        Ok(Trainer {
            data,
            graph,
            config: config.clone(),
            params,
            adam,
            rng,
            epochs_run: 0,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn epochs_run(&self) -> usize {
        self.epochs_run
    }

    /// One full-batch step: loss and gradients with a fresh dropout mask,
    /// Adam update, then dev evaluation with the updated parameters.
    pub fn run_epoch(&mut self) -> Result<EpochRecord> {
        let mask = if self.config.dropout_rate > 0.0 {
            Some(dropout_mask(
                self.params.w0.rows() * self.params.w0.cols(),
                self.config.dropout_rate,
                &mut self.rng,
            ))
        } else {
            None
        };
        let (loss, grads, _) = loss_and_gradients_masked(
            &self.data.x_train,
            &self.data.y_train,
            self.graph,
            &self.params,
            &self.config,
            mask.as_deref(),
        )?;
        self.epochs_run += 1;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch: self.epochs_run,
            });
        }
        adam_step(
            &mut self.params,
            &grads,
            &mut self.adam,
            self.config.learning_rate,
        );

        let dev_accuracy = self.evaluate(&self.data.x_dev, &self.data.y_dev)?;
        Ok(EpochRecord {
            epoch: self.epochs_run,
            loss,
            dev_accuracy,
        })
    }

    fn evaluate(&self, x: &SparseMatrix, labels: &[usize]) -> Result<f64> {
        let h_vm = super::propagate_words(
            self.graph,
            &self.params.w0,
            self.config.propagation_order,
            self.config.activation,
        )?;
        let fwd = forward(x, &h_vm, &self.params)?;
        Ok(fraction_correct(&argmax_rows(&fwd.probs), labels))
    }
}

/// Train to `max_epochs` or early stop, returning the best-dev parameters.
///
/// Improvement means strictly greater dev accuracy; training halts once
/// `early_stop_patience` consecutive epochs pass without one. Fully
/// deterministic for a fixed seed.
pub fn train(data: &TrainData, graph: &WordGraph, config: &TrainConfig) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(data, graph, config)?;
    let mut history = Vec::new();
    let mut best_params = trainer.params.clone();
    let mut best_epoch = 0usize;
    let mut best_acc = f64::NEG_INFINITY;
    let mut stale_epochs = 0usize;

    while trainer.epochs_run < config.max_epochs {
        let record = trainer.run_epoch()?;
        // Strictly-greater accuracy resets the patience counter; a tie with
        // the best still refreshes the snapshot, so plateaus keep the
        // most-trained parameters while still counting toward early stop.
        if record.dev_accuracy > best_acc {
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
        }
        if record.dev_accuracy >= best_acc {
            best_acc = record.dev_accuracy;
            best_params = trainer.params.clone();
            best_epoch = record.epoch;
        }
        history.push(record);
        if let Some(patience) = config.early_stop_patience {
            if stale_epochs >= patience {
                break;
            }
        }
    }

    Ok(TrainOutcome {
        params: best_params,
        history,
        best_epoch,
        best_dev_accuracy: if best_acc.is_finite() { best_acc } else { 0.0 },
    })
}
