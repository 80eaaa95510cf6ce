//! One epoch of each sampling scheme, run in place on a coordinate vector.

use nalgebra::DVector;

use super::method::{Family, MethodSpec, Sampling};
use super::schedule::StepsizeSchedule;
use crate::error::{invalid, Error, Result};
use crate::problems::{FiniteSumProblem, Point};
use crate::rng::SeedRng;

/// Component indices used by one inner iteration. `usize::MAX` marks a
/// full-gradient evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepIndices {
    pub extrapolation: usize,
    pub update: usize,
}

pub const FULL_GRADIENT: usize = usize::MAX;

/// Uniform permutation of `0..n` by Fisher-Yates.
pub fn sample_permutation(rng: &mut SeedRng, n: usize) -> Vec<usize> {
    rng.permutation(n)
}

/// Where the per-iteration `(alpha, beta)` come from.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Steps<'a> {
    Fixed(f64, f64),
    Schedule(&'a StepsizeSchedule, usize),
}

pub(crate) struct Workspace {
    w: DVector<f64>,
    g: DVector<f64>,
    start: DVector<f64>,
}

impl Workspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            w: DVector::zeros(dim),
            g: DVector::zeros(dim),
            start: DVector::zeros(dim),
        }
    }
}

fn eval(problem: &FiniteSumProblem, idx: usize, z: &DVector<f64>, out: &mut DVector<f64>) {
    if idx == FULL_GRADIENT {
        problem.apply_full_into(z, out);
    } else {
        problem.component(idx).apply_into(z, out);
    }
}

#[allow(clippy::too_many_arguments)]
fn inner(
    problem: &FiniteSumProblem,
    z: &mut DVector<f64>,
    ws: &mut Workspace,
    i: usize,
    j: usize,
    alpha: f64,
    beta: f64,
    step: usize,
) -> Result<()> {
    eval(problem, i, z, &mut ws.g);
    if alpha != 0.0 || i != j {
        ws.w.copy_from(z);
        ws.w.axpy(-alpha, &ws.g, 1.0);
        eval(problem, j, &ws.w, &mut ws.g);
    }
    z.axpy(-beta, &ws.g, 1.0);
    if z.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged { step })
    }
}

pub(crate) fn check_compatible(method: &MethodSpec, schedule: &StepsizeSchedule) -> Result<()> {
    method.validate()?;
    schedule.validate()?;
    if (method.family == Family::Dseg) != schedule.is_dual() {
        return invalid(format!(
            "{} needs {} schedule",
            method.family.name(),
            if method.family == Family::Dseg { "a dual" } else { "a single-sequence" }
        ));
    }
    Ok(())
}

/// Runs one epoch in place. `z` is left at the last finite iterate on
/// divergence.
pub(crate) fn epoch_in_place(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z: &mut DVector<f64>,
    steps: Steps<'_>,
    rng: &mut SeedRng,
    ws: &mut Workspace,
    mut trace: Option<&mut Vec<StepIndices>>,
) -> Result<()> {
    let n = problem.n();
    let family = method.family;
    let at = |t_in_epoch: usize| -> (f64, f64) {
        match steps {
            Steps::Fixed(a, b) => (a, b),
            Steps::Schedule(s, k) => match family.sampling() {
                Sampling::IndependentUniform => s.dual(n * k + t_in_epoch),
                Sampling::Deterministic => {
                    let eta = s.eta(k);
                    (eta, eta * method.eg_plus_ratio)
                }
                _ => method.stepsizes(s.eta(k)),
            },
        }
    };
    let mut record = |i: usize, j: usize| {
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(StepIndices {
                extrapolation: i,
                update: j,
            });
        }
    };

    if family.is_anchored() {
        ws.start.copy_from(z);
    }
    let last = z.clone();
    let outcome = (|| {
        match family.sampling() {
            Sampling::Uniform => {
                for t in 0..n {
                    let i = rng.below(n);
                    record(i, i);
                    let (a, b) = at(t);
                    inner(problem, z, ws, i, i, a, b, t)?;
                }
            }
            Sampling::IndependentUniform => {
                for t in 0..n {
                    let i = rng.below(n);
                    let j = rng.below(n);
                    record(i, j);
                    let (a, b) = at(t);
                    inner(problem, z, ws, i, j, a, b, t)?;
                }
            }
            Sampling::Reshuffle | Sampling::FlipFlop => {
                let tau = sample_permutation(rng, n);
                let (a, b) = at(0);
                for (t, &i) in tau.iter().enumerate() {
                    record(i, i);
                    inner(problem, z, ws, i, i, a, b, t)?;
                }
                if family.sampling() == Sampling::FlipFlop {
                    for (t, &i) in tau.iter().rev().enumerate() {
                        record(i, i);
                        inner(problem, z, ws, i, i, a, b, n + t)?;
                    }
                }
            }
            Sampling::Deterministic => {
                record(FULL_GRADIENT, FULL_GRADIENT);
                let (a, b) = at(0);
                inner(problem, z, ws, FULL_GRADIENT, FULL_GRADIENT, a, b, 0)?;
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        z.copy_from(&last);
        return Err(e);
    }
    if family.is_anchored() {
        *z += &ws.start;
        *z *= 0.5;
    }
    Ok(())
}

fn epoch_point(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z: &Point,
    steps: Steps<'_>,
    rng: &mut SeedRng,
    trace: Option<&mut Vec<StepIndices>>,
) -> Result<Point> {
    z.check_dims(problem.d1(), problem.d2())?;
    let mut v = z.coords().clone();
    let mut ws = Workspace::new(problem.dim());
    epoch_in_place(method, problem, &mut v, steps, rng, &mut ws, trace)?;
    Point::from_vector(v, problem.d1(), problem.d2())
}

/// Executes exactly one epoch of `method` starting from `z`.
///
/// Shuffling methods and EG read the schedule at `epoch_k`; DSEG reads it at
/// the global iteration `n * epoch_k + i`.
pub fn run_epoch(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z: &Point,
    epoch_k: usize,
    schedule: &StepsizeSchedule,
    rng: &mut SeedRng,
) -> Result<Point> {
    check_compatible(method, schedule)?;
    epoch_point(method, problem, z, Steps::Schedule(schedule, epoch_k), rng, None)
}

/// [`run_epoch`] that also reports the component indices of every inner
/// iteration.
pub fn run_epoch_traced(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z: &Point,
    epoch_k: usize,
    schedule: &StepsizeSchedule,
    rng: &mut SeedRng,
) -> Result<(Point, Vec<StepIndices>)> {
    check_compatible(method, schedule)?;
    let mut trace = Vec::new();
    let out = epoch_point(
        method,
        problem,
        z,
        Steps::Schedule(schedule, epoch_k),
        rng,
        Some(&mut trace),
    )?;
    Ok((out, trace))
}

/// One epoch with the same `(alpha, beta)` at every inner iteration,
/// ignoring the method's alpha rule.
pub fn run_epoch_with_stepsizes(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z: &Point,
    alpha: f64,
    beta: f64,
    rng: &mut SeedRng,
) -> Result<Point> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return invalid("stepsizes must be nonnegative");
    }
    epoch_point(method, problem, z, Steps::Fixed(alpha, beta), rng, None)
}
