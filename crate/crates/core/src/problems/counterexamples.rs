//! Hand-built instances on which specific methods provably misbehave.

use nalgebra::{DMatrix, DVector};

use super::{FiniteSumProblem, QuadraticComponent};
use crate::error::{invalid, Result};

fn scalar(v: f64) -> DMatrix<f64> {
    DMatrix::from_element(1, 1, v)
}

fn scalar_component(a: f64, b: f64, c: f64, t: [f64; 2]) -> Result<QuadraticComponent> {
    QuadraticComponent::new(scalar(a), scalar(b), scalar(c), DVector::from_row_slice(&t))
}

/// Two nilpotent bilinear-plus-quadratic components whose average is the
/// bilinear `(L/2)xy`. Same-sample SEG with uniform sampling, random
/// reshuffling or flip-flop grows `E‖z‖²` for every positive stepsize.
///
/// `F_1 = [[−L/2, L/2], [−L/2, L/2]]`, `F_2 = [[L/2, L/2], [−L/2, −L/2]]`.
pub fn divergence_example(l: f64) -> Result<FiniteSumProblem> {
    if !(l > 0.0) {
        return invalid("L must be positive");
    }
    let q = l / 4.0;
    FiniteSumProblem::new(vec![
        scalar_component(-q, q, q, [0.0, 0.0])?,
        scalar_component(q, q, -q, [0.0, 0.0])?,
    ])
}

/// `f_{1,2} = Lxy ± (νx − νy)` with `ν² = σ²/2`: constant component noise of
/// size `σ²` on a bilinear problem.
pub fn variance_floor_example(l: f64, sigma: f64) -> Result<FiniteSumProblem> {
    if !(l > 0.0) {
        return invalid("L must be positive");
    }
    if !(sigma >= 0.0) {
        return invalid("sigma must be nonnegative");
    }
    let nu = sigma / std::f64::consts::SQRT_2;
    FiniteSumProblem::new(vec![
        scalar_component(0.0, l / 2.0, 0.0, [-nu, nu])?,
        scalar_component(0.0, l / 2.0, 0.0, [nu, -nu])?,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundKind {
    /// `x ∈ R³`, built on the shuffled-SGD quadratic with sign-flipping
    /// linear terms.
    Sgda,
    /// `x ∈ R²`, variance exactly `σ²` everywhere.
    Seg,
}

/// Strongly monotone instances with sign-flipping linear terms that keep
/// random reshuffling away from the optimum. The first `n/2` components
/// carry the `+` sign.
pub fn rr_lower_bound_example(
    l: f64,
    mu: f64,
    sigma: f64,
    n: usize,
    kind: LowerBoundKind,
) -> Result<FiniteSumProblem> {
    if n == 0 || !n.is_multiple_of(2) {
        return invalid(format!("n must be even and positive (got {n})"));
    }
    if !(l > 0.0 && mu > 0.0) {
        return invalid("L and mu must be positive");
    }
    if l / mu < 2.0 {
        return invalid(format!("need L/mu >= 2 (got {})", l / mu));
    }
    if !(sigma >= 0.0) {
        return invalid("sigma must be nonnegative");
    }
    let components = (0..n)
        .map(|i| {
            let s = if i < n / 2 { 1.0 } else { 0.0 };
            let sign = 2.0 * s - 1.0;
            match kind {
                LowerBoundKind::Seg => QuadraticComponent::new(
                    DMatrix::from_diagonal(&DVector::from_row_slice(&[l / 2.0, l / 4.0])),
                    DMatrix::zeros(2, 1),
                    scalar(mu / 2.0),
                    DVector::from_row_slice(&[0.0, -sigma * sign, 0.0]),
                ),
                LowerBoundKind::Sgda => QuadraticComponent::new(
                    DMatrix::from_diagonal(&DVector::from_row_slice(&[
                        mu / 2.0,
                        l / 2.0,
                        l / 2.0 * s,
                    ])),
                    DMatrix::zeros(3, 1),
                    scalar(mu / 2.0),
                    DVector::from_row_slice(&[0.0, -sigma / 2.0 * sign, -sigma / 2.0 * sign, 0.0]),
                ),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSumProblem::new(components)
}

/// Single-component bilinear game `f(x, y) = xy`, `F z = (y, −x)`.
pub fn bilinear_xy() -> FiniteSumProblem {
    FiniteSumProblem::new(vec![scalar_component(0.0, 0.5, 0.0, [0.0, 0.0]).expect("valid")])
        .expect("valid")
}
