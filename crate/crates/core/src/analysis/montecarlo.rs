use rayon::prelude::*;

use super::stats::{MomentEstimate, Welford};
use crate::error::{invalid, Error, Result};
use crate::optimizers::{
    epoch_in_place, run_epoch, MethodSpec, StepsizeSchedule, Steps, Workspace,
};
use crate::problems::{FiniteSumProblem, Point};
use crate::rng::SeedRng;

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    /// Entry `k` estimates `E‖z₀^k − z*‖²`; entry 0 is the start.
    pub per_epoch: Vec<MomentEstimate>,
    /// Trials that diverged before the last epoch. Later entries average
    /// over the surviving trials only.
    pub truncated_trials: usize,
}

impl McReport {
    pub fn partial_coverage(&self) -> bool {
        self.truncated_trials > 0
    }
}

/// Squared distances of one trial, stopping at the first divergence.
fn trial<F>(z0: &Point, reference: &nalgebra::DVector<f64>, epochs: usize, mut step: F) -> Vec<f64>
where
    F: FnMut(usize, &mut nalgebra::DVector<f64>) -> Result<()>,
{
    let mut z = z0.coords().clone();
    let mut out = Vec::with_capacity(epochs + 1);
    out.push((&z - reference).norm_squared());
    for k in 0..epochs {
        if step(k, &mut z).is_err() {
            break;
        }
        let d = (&z - reference).norm_squared();
        if !d.is_finite() {
            break;
        }
        out.push(d);
    }
    out
}

fn reduce(trials: Vec<Vec<f64>>, epochs: usize) -> McReport {
    let mut acc = vec![Welford::default(); epochs + 1];
    let mut truncated = 0;
    for t in &trials {
        if t.len() < epochs + 1 {
            truncated += 1;
        }
        for (k, v) in t.iter().enumerate() {
            acc[k].push(*v);
        }
    }
    McReport {
        per_epoch: acc.iter().map(Welford::estimate).collect(),
        truncated_trials: truncated,
    }
}

fn reference(problem: &FiniteSumProblem) -> nalgebra::DVector<f64> {
    problem
        .equilibrium()
        .map(Point::into_vector)
        .unwrap_or_else(|_| nalgebra::DVector::zeros(problem.dim()))
}

/// Monte-Carlo estimate of `E‖z₀^k − z*‖²` for `k = 0..=epochs`.
///
/// Trial `t` samples with the stream derived from `(master_seed, t)`;
/// trials may run in parallel, the reduction is in trial order.
pub fn mc_expected_sq_norm(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z0: &Point,
    schedule: &StepsizeSchedule,
    epochs: usize,
    trials: usize,
    master_seed: u64,
) -> Result<McReport> {
    if trials < 2 {
        return invalid("need at least 2 trials");
    }
    // surfaces configuration errors instead of reporting them as divergence
    run_epoch(method, problem, z0, 0, schedule, &mut SeedRng::new(master_seed))
        .map(|_| ())
        .or_else(|e| if matches!(e, Error::Diverged { .. }) { Ok(()) } else { Err(e) })?;
    let r = reference(problem);
    let results: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedRng::derived(master_seed, t);
            let mut ws = Workspace::new(problem.dim());
            trial(z0, &r, epochs, |k, z| {
                epoch_in_place(method, problem, z, Steps::Schedule(schedule, k), &mut rng, &mut ws, None)
            })
        })
        .collect();
    Ok(reduce(results, epochs))
}

/// [`mc_expected_sq_norm`] with the same `(alpha, beta)` at every inner
/// iteration.
#[allow(clippy::too_many_arguments)]
pub fn mc_expected_sq_norm_with_stepsizes(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z0: &Point,
    alpha: f64,
    beta: f64,
    epochs: usize,
    trials: usize,
    master_seed: u64,
) -> Result<McReport> {
    if trials < 2 {
        return invalid("need at least 2 trials");
    }
    if !(alpha >= 0.0 && beta >= 0.0) {
        return invalid("stepsizes must be nonnegative");
    }
    method.validate()?;
    z0.check_dims(problem.d1(), problem.d2())?;
    let r = reference(problem);
    let results: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = SeedRng::derived(master_seed, t);
            let mut ws = Workspace::new(problem.dim());
            trial(z0, &r, epochs, |_, z| {
                epoch_in_place(method, problem, z, Steps::Fixed(alpha, beta), &mut rng, &mut ws, None)
            })
        })
        .collect();
    Ok(reduce(results, epochs))
}
