use std::f64::consts::PI;

use super::MultiIndex;

/// `h_0(x), ..., h_n(x)` by the three-term recurrence
/// `h_{k+1} = x √(2/(k+1)) h_k − √(k/(k+1)) h_{k−1}`, `h_0 = π^{-1/4} e^{-x²/2}`.
pub fn hermite_functions_upto(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if n == 0 {
        return out;
    }
    out.push(x * 2f64.sqrt() * h0);
    for k in 1..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// `h_α(x) = Π h_{α_i}(x_i)`.
pub fn hermite_function_eval(alpha: &MultiIndex, x: &[f64]) -> f64 {
    assert_eq!(alpha.dim(), x.len(), "point dimension mismatch");
    alpha
        .entries()
        .iter()
        .zip(x)
        .map(|(&a, &xi)| hermite_functions_upto(a as usize, xi)[a as usize])
        .product()
}
