//! Closed-form second-moment recursions on the counterexamples.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorRecursion {
    /// `E‖z_t‖²` for `t = 0..=steps`.
    pub values: Vec<f64>,
    pub coefficient: f64,
    /// Limit of the recursion when the coefficient lies in `(0, 1)`.
    pub fixed_point: Option<f64>,
}

/// `E‖z_{t+1}‖² = (1 − 2αβL² + β²L²(1+α²L²)) E‖z_t‖² + β²σ²(1+α²L²)` for
/// SEG-US on the variance-floor example.
pub fn segus_floor_recursion(
    alpha: f64,
    beta: f64,
    l: f64,
    sigma: f64,
    z0_sq: f64,
    steps: usize,
) -> Result<FloorRecursion> {
    if !(alpha > 0.0 && beta > 0.0) {
        return invalid("alpha and beta must be positive");
    }
    let l2 = l * l;
    let coefficient = 1.0 - 2.0 * alpha * beta * l2 + beta * beta * l2 * (1.0 + alpha * alpha * l2);
    let noise = beta * beta * sigma * sigma * (1.0 + alpha * alpha * l2);
    let mut values = Vec::with_capacity(steps + 1);
    let mut e = z0_sq;
    values.push(e);
    for _ in 0..steps {
        e = coefficient * e + noise;
        values.push(e);
    }
    let fixed_point = (coefficient > 0.0 && coefficient < 1.0).then(|| noise / (1.0 - coefficient));
    Ok(FloorRecursion {
        values,
        coefficient,
        fixed_point,
    })
}

/// `ν = βL/2 − αβL²/4`, the per-step contraction gap of the noisy
/// coordinate in the SEG random-reshuffling lower-bound instance.
pub fn rr_lower_bound_nu(l: f64, alpha: f64, beta: f64) -> f64 {
    beta * l / 2.0 - alpha * beta * l * l / 4.0
}

/// `E[Φ²]` for the balanced sign pattern, from `E[εᵢεⱼ] = −1/(n−1)`.
pub fn phi_second_moment_closed_form(n: usize, nu: f64) -> Result<f64> {
    if n < 2 || !n.is_multiple_of(2) {
        return invalid("n must be even and at least 2");
    }
    let w: Vec<f64> = (1..=n).map(|i| (1.0 - nu).powi((n - i) as i32)).collect();
    let s1: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|v| v * v).sum();
    let nf = n as f64;
    Ok((nf * s2 - s1 * s1) / (nf - 1.0))
}

/// `E[x₂²]` per epoch of SEG-RR with constant `(α, β)` on the SEG
/// lower-bound instance:
/// `E[x₂'²] = q^{2n} E[x₂²] + β²σ²(1 − αL/2)² E[Φ²]` with `q = 1 − ν`.
pub fn segrr_lower_bound_recursion(
    l: f64,
    alpha: f64,
    beta: f64,
    sigma: f64,
    n: usize,
    x2_sq: f64,
    epochs: usize,
) -> Result<Vec<f64>> {
    if !(alpha >= 0.0 && beta > 0.0) {
        return invalid("need alpha >= 0 and beta > 0");
    }
    let nu = rr_lower_bound_nu(l, alpha, beta);
    let phi2 = phi_second_moment_closed_form(n, nu)?;
    let q2n = (1.0 - nu).powi(2 * n as i32);
    let noise = (beta * sigma * (1.0 - alpha * l / 2.0)).powi(2) * phi2;
    let mut out = Vec::with_capacity(epochs + 1);
    let mut e = x2_sq;
    out.push(e);
    for _ in 0..epochs {
        e = q2n * e + noise;
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_example() {
        let r = segus_floor_recursion(0.1, 0.1, 1.0, 1.0, 4.0, 5000).unwrap();
        let fp = r.fixed_point.unwrap();
        assert!((fp - 0.0101 / 0.0099).abs() < 1e-12);
        assert!((r.values.last().unwrap() - fp).abs() < 1e-9);
    }

    #[test]
    fn noiseless_decreases_to_zero() {
        let r = segus_floor_recursion(0.3, 0.2, 1.0, 0.0, 1.0, 2000).unwrap();
        assert!(r.values.windows(2).all(|w| w[1] < w[0]));
        assert!(*r.values.last().unwrap() < 1e-30);
    }

    #[test]
    fn phi_two_components() {
        let nu = 0.3;
        assert!((phi_second_moment_closed_form(2, nu).unwrap() - nu * nu).abs() < 1e-15);
        assert!(phi_second_moment_closed_form(3, nu).is_err());
    }
}
