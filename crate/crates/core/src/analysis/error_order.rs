//! Within-epoch error against the deterministic EG step.

use serde::{Deserialize, Serialize};

use super::stats::ols;
use crate::error::{invalid, Result};
use crate::optimizers::{eg_plus_step, run_epoch_with_stepsizes, MethodSpec, Sampling};
use crate::problems::{FiniteSumProblem, Point};
use crate::rng::SeedRng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochErrorSample {
    pub eta: f64,
    /// `‖z_next − (z − ηn F(z − ηn F z))‖`.
    pub error_norm: f64,
    /// Set when `η ≥ 1/(nL)`, outside the regime the error bounds cover.
    pub regime_violated: bool,
}

/// Update stepsize that makes one epoch's first-order displacement `ηn F z`.
///
/// A plain flip-flop epoch visits every component twice and an anchored
/// epoch keeps half of its displacement, so the per-step `β` is rescaled by
/// `n / (steps * kept)`.
pub fn matched_beta(method: &MethodSpec, eta: f64) -> Result<f64> {
    let steps = match method.family.sampling() {
        Sampling::Uniform | Sampling::Reshuffle => 1.0,
        Sampling::FlipFlop => 2.0,
        _ => return invalid(format!("{} has no within-epoch error", method.family.name())),
    };
    let kept = if method.family.is_anchored() { 0.5 } else { 1.0 };
    Ok(eta / (steps * kept))
}

/// One epoch of `method` from `z0` minus the EG step with stepsize `ηn`.
///
/// SEG-FFA runs with `β = η, α = η/2`; SEG-FF with `β = η/2`; the other
/// shuffling methods with `β = η`. `α` follows the method's alpha rule.
pub fn epoch_error(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z0: &Point,
    eta: f64,
    seed: u64,
) -> Result<EpochErrorSample> {
    if !(eta > 0.0 && eta.is_finite()) {
        return invalid("eta must be positive");
    }
    method.validate()?;
    let beta = matched_beta(method, eta)?;
    let (alpha, beta) = method.stepsizes(beta);
    let n = problem.n() as f64;
    let l = problem.spectral_report()?.smoothness_l;

    let mut rng = SeedRng::new(seed);
    let epoch = run_epoch_with_stepsizes(method, problem, z0, alpha, beta, &mut rng)?;
    let eg = eg_plus_step(problem, z0, eta * n, eta * n)?;
    Ok(EpochErrorSample {
        eta,
        error_norm: (epoch.coords() - eg.coords()).norm(),
        regime_violated: eta * n * l >= 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorOrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub used: usize,
    /// Samples dropped for a zero error.
    pub excluded: usize,
}

/// OLS slope of `log(error)` against `log(η)`.
pub fn fit_error_order(samples: &[EpochErrorSample]) -> Result<f64> {
    Ok(fit_error_order_detailed(samples)?.slope)
}

pub fn fit_error_order_detailed(samples: &[EpochErrorSample]) -> Result<ErrorOrderFit> {
    if samples.iter().any(|s| !(s.eta > 0.0) || !s.error_norm.is_finite() || s.error_norm < 0.0) {
        return invalid("samples need positive eta and finite nonnegative error");
    }
    let usable: Vec<_> = samples
        .iter()
        .filter(|s| s.error_norm > 0.0)
        .map(|s| (s.eta.ln(), s.error_norm.ln()))
        .collect();
    if usable.len() < 4 {
        return invalid(format!(
            "need at least 4 samples with nonzero error, got {}",
            usable.len()
        ));
    }
    let mut etas: Vec<f64> = usable.iter().map(|p| p.0).collect();
    etas.sort_by(f64::total_cmp);
    etas.dedup();
    if etas.len() != usable.len() {
        return invalid("eta values must be distinct");
    }
    let (slope, intercept) = ols(&usable)?;
    Ok(ErrorOrderFit {
        slope,
        intercept,
        used: usable.len(),
        excluded: samples.len() - usable.len(),
    })
}
