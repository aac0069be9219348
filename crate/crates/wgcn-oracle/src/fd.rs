//! Central finite differences over a flat parameter vector.

/// Numeric gradient `(f(x + h e_i) - f(x - h e_i)) / 2h` per coordinate.
pub fn central_difference<F>(mut f: F, x: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(
        (1e-7..=1e-3).contains(&h),
        "step size {h} outside the sensible range"
    );
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let plus = f(&probe);
            probe[i] = orig - h;
            let minus = f(&probe);
            probe[i] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}
