use rayon::prelude::*;

use super::stats::MomentEstimate;
use crate::error::{invalid, Result};
use crate::optimizers::{epoch_in_place, MethodSpec, StepsizeSchedule, Steps, Workspace};
use crate::problems::FiniteSumProblem;
use crate::rng::SeedRng;

/// Stationary `E‖z₀^k − z*‖²` under a constant stepsize.
///
/// Each trial starts at `z*`, runs `burn_in_epochs`, then averages the
/// squared distance over `window_epochs` epoch starts. The estimate is the
/// mean of those per-trial averages.
pub fn noise_floor(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    eta: f64,
    burn_in_epochs: usize,
    window_epochs: usize,
    trials: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if window_epochs == 0 || trials == 0 {
        return invalid("window and trial count must be positive");
    }
    let schedule = StepsizeSchedule::constant(eta)?;
    method.validate()?;
    if schedule.is_dual() != (method.family == crate::optimizers::Family::Dseg) {
        return invalid("noise floor needs a single-sequence method");
    }
    let star = problem.equilibrium()?.into_vector();
    let per_trial: Vec<Result<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedRng::derived(seed, t);
            let mut ws = Workspace::new(problem.dim());
            let mut z = star.clone();
            let steps = Steps::Schedule(&schedule, 0);
            for _ in 0..burn_in_epochs {
                epoch_in_place(method, problem, &mut z, steps, &mut rng, &mut ws, None)?;
            }
            let mut acc = 0.0;
            for _ in 0..window_epochs {
                epoch_in_place(method, problem, &mut z, steps, &mut rng, &mut ws, None)?;
                acc += (&z - &star).norm_squared();
            }
            Ok(acc / window_epochs as f64)
        })
        .collect();
    let values = per_trial.into_iter().collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_samples(&values)
}

/// Burn-in of ten mixing times `1/(2ημn)` epochs, at least 50.
pub fn default_burn_in(eta: f64, mu: f64, n: usize) -> usize {
    let mixing = 1.0 / (2.0 * eta * mu * n as f64);
    ((10.0 * mixing).ceil() as usize).max(50)
}
