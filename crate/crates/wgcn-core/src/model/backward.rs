//! Hand-derived gradients of the summed cross-entropy objective.
//!
//! The chain runs backward through softmax, the head bias and weights, the
//! head ReLU (subgradient 0 at 0), the sparse document projection, the
//! optional dropout mask and propagation activation, and finally the `n`
//! propagation steps into `W0`. The word graph is symmetric, so the
//! transposed propagation reuses the same adjacency.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fmath;
use crate::sparse::{spmm, SparseMatrix};
use crate::wgraph::WordGraph;

use super::{forward, Activation, ModelParams, TrainConfig};

/// Per-parameter gradient tensors, shaped like [`ModelParams`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
}

/// Loss and exact gradients of
/// `sum_i -ln p(y_i | x_i) + (weight_decay / 2) (|W0|^2 + |W1|^2)`
/// (bias excluded from the decay term). Dropout does not enter this
/// objective; the training loop applies it through the masked variant.
pub fn loss_and_gradients(
    x: &SparseMatrix,
    labels: &[usize],
    graph: &WordGraph,
    params: &ModelParams,
    config: &TrainConfig,
) -> Result<(f64, Gradients)> {
    let (loss, grads, _) = loss_and_gradients_masked(x, labels, graph, params, config, None)?;
    Ok((loss, grads))
}

/// As [`loss_and_gradients`], with an optional inverted-dropout mask over
/// the `v x m` word representations. Also returns the pre-activation
/// propagated words so callers can evaluate without re-propagating.
pub(crate) fn loss_and_gradients_masked(
    x: &SparseMatrix,
    labels: &[usize],
    graph: &WordGraph,
    params: &ModelParams,
    config: &TrainConfig,
    mask: Option<&[f64]>,
) -> Result<(f64, Gradients, DenseMatrix)> {
    if labels.len() != x.rows() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} labels for {} documents",
            labels.len(),
            x.rows()
        )));
    }
    let num_classes = params.num_classes();
    for &y in labels {
        if y >= num_classes {
            return Err(Error::LabelOutOfRange {
                label: y,
                num_classes,
            });
        }
    }
    if let Some(m) = mask {
        debug_assert_eq!(m.len(), params.w0.rows() * params.w0.cols());
    }

    let n = config.propagation_order;
    let p_pre = super::propagate_raw(graph, &params.w0, n)?;
    let mut h_vm = p_pre.map(|v| config.activation.apply(v));
    if let Some(m) = mask {
        for (h, &s) in h_vm.values_mut().iter_mut().zip(m) {
            *h *= s;
        }
    }

    let fwd = forward(x, &h_vm, params)?;

    // Summed cross-entropy from the stabilized logits.
    let mut loss = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let row = fwd.logits.row(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse: f64 = row.iter().map(|&z| fmath::exp(z - max)).sum();
        loss += -(row[y] - max) + fmath::ln(lse);
    }
    let wd = config.weight_decay;
    if wd != 0.0 {
        loss += 0.5 * wd * (params.w0.frobenius_sq() + params.w1.frobenius_sq());
    }

    // d logits = probs - onehot(y)
    let mut dz = fwd.probs.clone();
    for (r, &y) in labels.iter().enumerate() {
        let v = dz.get(r, y);
        dz.set(r, y, v - 1.0);
    }

    let mut db1 = vec![0.0f64; num_classes];
    for r in 0..dz.rows() {
        for (acc, &g) in db1.iter_mut().zip(dz.row(r)) {
            *acc += g;
        }
    }

    let a1 = fwd.h_dm.map(|v| if v > 0.0 { v } else { 0.0 });
    let mut dw1 = a1.transpose().matmul(&dz)?;
    if wd != 0.0 {
        for (g, &w) in dw1.values_mut().iter_mut().zip(params.w1.values()) {
            *g += wd * w;
        }
    }

    let da1 = dz.matmul(&params.w1.transpose())?;
    let mut dh_dm = da1;
    for (g, &h) in dh_dm.values_mut().iter_mut().zip(fwd.h_dm.values()) {
        if h <= 0.0 {
            *g = 0.0;
        }
    }

    let mut dh_vm = spmm(&x.transpose(), &dh_dm)?;
    if let Some(m) = mask {
        for (g, &s) in dh_vm.values_mut().iter_mut().zip(m) {
            *g *= s;
        }
    }
    if config.activation == Activation::Relu {
        for (g, &p) in dh_vm.values_mut().iter_mut().zip(p_pre.values()) {
            if p <= 0.0 {
                *g = 0.0;
            }
        }
    }

    // (A^n)^T = A^n for the symmetric word graph.
    let mut dw0 = dh_vm;
    for _ in 0..n {
        dw0 = spmm(graph.adjacency(), &dw0)?;
    }
    if wd != 0.0 {
        for (g, &w) in dw0.values_mut().iter_mut().zip(params.w0.values()) {
            *g += wd * w;
        }
    }

    Ok((
        loss,
        Gradients {
            w0: dw0,
            w1: dw1,
            b1: db1,
        },
        p_pre,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseMatrix;
    use crate::wgraph::{WordGraph, WordGraphKind};

    fn setup(v: usize, m: usize, c: usize) -> (WordGraph, ModelParams, TrainConfig) {
        let graph =
            WordGraph::from_parts(SparseMatrix::identity(v), WordGraphKind::Npmi, 1).unwrap();
        let params = ModelParams {
            w0: DenseMatrix::zeros(v, m),
            w1: DenseMatrix::zeros(m, c),
            b1: vec![0.0; c],
            hidden_dim: m,
        };
        let config = TrainConfig {
            weight_decay: 0.0,
            dropout_rate: 0.0,
            ..TrainConfig::default()
        };
        (graph, params, config)
    }

    #[test]
    fn zero_parameters_give_uniform_loss() {
        let (graph, params, config) = setup(4, 3, 5);
        let x = SparseMatrix::from_triplets(2, 4, &[(0, 0, 1.0), (1, 2, 1.0)]).unwrap();
        let (loss, _) = loss_and_gradients(&x, &[0, 4], &graph, &params, &config).unwrap();
        // B samples of uniform softmax over c classes.
        assert!((loss - 2.0 * 5.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn near_perfect_prediction_drives_loss_to_zero() {
        let (graph, mut params, config) = setup(2, 2, 2);
        // One word per class, huge margins.
        params.w0 = DenseMatrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        params.w1 = DenseMatrix::from_vec(2, 2, vec![50.0, -50.0, -50.0, 50.0]).unwrap();
        let x = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let (loss, _) = loss_and_gradients(&x, &[0, 1], &graph, &params, &config).unwrap();
        assert!(loss >= 0.0);
        assert!(loss < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_labels() {
        let (graph, params, config) = setup(2, 2, 2);
        let x = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]).unwrap();
        let err = loss_and_gradients(&x, &[2], &graph, &params, &config).unwrap_err();
        assert!(matches!(err, Error::LabelOutOfRange { .. }));
    }

    #[test]
    fn rejects_label_count_mismatch() {
        let (graph, params, config) = setup(2, 2, 2);
        let x = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]).unwrap();
        assert!(loss_and_gradients(&x, &[0, 1], &graph, &params, &config).is_err());
    }
}
