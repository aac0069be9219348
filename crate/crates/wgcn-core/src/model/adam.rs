//! Plain Adam with bias correction.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::fmath;

use super::{Gradients, ModelParams};

/// First/second moment accumulators mirroring the parameter tensors, plus
/// the step counter and running beta powers for bias correction.
#[derive(Debug, Clone)]
pub struct AdamState {
    m_w0: DenseMatrix,
    v_w0: DenseMatrix,
    m_w1: DenseMatrix,
    v_w1: DenseMatrix,
    m_b1: Vec<f64>,
    v_b1: Vec<f64>,
    step: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    beta1_pow: f64,
    beta2_pow: f64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        AdamState {
            m_w0: DenseMatrix::zeros(params.w0.rows(), params.w0.cols()),
            v_w0: DenseMatrix::zeros(params.w0.rows(), params.w0.cols()),
            m_w1: DenseMatrix::zeros(params.w1.rows(), params.w1.cols()),
            v_w1: DenseMatrix::zeros(params.w1.rows(), params.w1.cols()),
            m_b1: vec![0.0; params.b1.len()],
            v_b1: vec![0.0; params.b1.len()],
            step: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            beta1_pow: 1.0,
            beta2_pow: 1.0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

#[allow(clippy::too_many_arguments)]
fn update_slice(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    bias1: f64,
    bias2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bias1;
        let v_hat = v[i] / bias2;
        params[i] -= lr * m_hat / (fmath::sqrt(v_hat) + epsilon);
    }
}

/// One Adam update over every parameter tensor, in place.
pub fn adam_step(params: &mut ModelParams, grads: &Gradients, state: &mut AdamState, lr: f64) {
    debug_assert_eq!(params.w0.values().len(), grads.w0.values().len());
    debug_assert_eq!(params.w1.values().len(), grads.w1.values().len());
    debug_assert_eq!(params.b1.len(), grads.b1.len());

    state.step += 1;
    state.beta1_pow *= state.beta1;
    state.beta2_pow *= state.beta2;
    let bias1 = 1.0 - state.beta1_pow;
    let bias2 = 1.0 - state.beta2_pow;
    let (beta1, beta2, epsilon) = (state.beta1, state.beta2, state.epsilon);

    update_slice(
        params.w0.values_mut(),
        grads.w0.values(),
        state.m_w0.values_mut(),
        state.v_w0.values_mut(),
        lr,
        beta1,
        beta2,
        epsilon,
        bias1,
        bias2,
    );
    update_slice(
        params.w1.values_mut(),
        grads.w1.values(),
        state.m_w1.values_mut(),
        state.v_w1.values_mut(),
        lr,
        beta1,
        beta2,
        epsilon,
        bias1,
        bias2,
    );
    update_slice(
        &mut params.b1,
        &grads.b1,
        &mut state.m_b1,
        &mut state.v_b1,
        lr,
        beta1,
        beta2,
        epsilon,
        bias1,
        bias2,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_params() -> ModelParams {
        ModelParams {
            w0: DenseMatrix::zeros(2, 2),
            w1: DenseMatrix::zeros(2, 2),
            b1: vec![0.0; 2],
            hidden_dim: 2,
        }
    }

    fn grads_of(value: f64, params: &ModelParams) -> Gradients {
        Gradients {
            w0: params.w0.map(|_| value),
            w1: params.w1.map(|_| value),
            b1: vec![value; params.b1.len()],
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut params = tiny_params();
        let before = params.clone();
        let mut state = AdamState::new(&params);
        let grads = grads_of(0.0, &params);
        adam_step(&mut params, &grads, &mut state, 0.1);
        assert_eq!(params, before);
        assert_eq!(state.step(), 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate_against_gradient_sign() {
        let mut params = tiny_params();
        let mut state = AdamState::new(&params);
        let grads = grads_of(3.0, &params);
        adam_step(&mut params, &grads, &mut state, 0.05);
        for &w in params.w0.values() {
            // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
            assert!((w + 0.05).abs() < 1e-8);
        }
    }
}
