//! One-parameter Adam, written the textbook way (explicit powers).

/// Run Adam on a single scalar from `x0` through the given gradient
/// sequence; beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8.
pub fn scalar_adam(x0: f64, grads: &[f64], lr: f64) -> f64 {
    let (beta1, beta2, eps) = (0.9f64, 0.999f64, 1e-8f64);
    let (mut m, mut v, mut x) = (0.0f64, 0.0f64, x0);
    for (step, &g) in grads.iter().enumerate() {
        let t = (step + 1) as i32;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        let m_hat = m / (1.0 - beta1.powi(t));
        let v_hat = v / (1.0 - beta2.powi(t));
        x -= lr * m_hat / (v_hat.sqrt() + eps);
    }
    x
}
