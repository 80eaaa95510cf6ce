use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::epoch::{check_compatible, epoch_in_place, Steps, Workspace};
use super::method::MethodSpec;
use super::schedule::StepsizeSchedule;
use crate::error::{invalid, Error, Result};
use crate::problems::{FiniteSumProblem, Point};
use crate::rng::SeedRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub pass_index: usize,
    pub epoch_index: usize,
    /// `‖F z‖²` at the epoch start; non-finite only on the divergence row.
    pub grad_norm_sq: f64,
    pub dist_sq: Option<f64>,
    pub z_snapshot: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub epoch_index: usize,
    pub pass_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: MethodSpec,
    pub seed: u64,
    pub schedule: StepsizeSchedule,
    pub checkpoints: Vec<Checkpoint>,
    pub diverged: Option<Divergence>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub record_snapshots: bool,
    /// Distance reference. `None` skips the distance column.
    pub equilibrium: Option<Point>,
}

/// Runs `method` for `budget_passes` passes over the data.
///
/// A checkpoint is taken at pass 0, whenever the pass count reaches a new
/// multiple of `checkpoint_stride`, and at the end. The equilibrium is
/// solved for once up front; problems without one get no distance column.
#[allow(clippy::too_many_arguments)]
pub fn run(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z0: &Point,
    schedule: &StepsizeSchedule,
    budget_passes: usize,
    checkpoint_stride: usize,
    seed: u64,
) -> Result<RunRecord> {
    let options = RunOptions {
        record_snapshots: false,
        equilibrium: problem.equilibrium().ok(),
    };
    run_with_options(method, problem, z0, schedule, budget_passes, checkpoint_stride, seed, &options)
}

#[allow(clippy::too_many_arguments)]
pub fn run_with_options(
    method: &MethodSpec,
    problem: &FiniteSumProblem,
    z0: &Point,
    schedule: &StepsizeSchedule,
    budget_passes: usize,
    checkpoint_stride: usize,
    seed: u64,
    options: &RunOptions,
) -> Result<RunRecord> {
    check_compatible(method, schedule)?;
    if checkpoint_stride == 0 {
        return invalid("checkpoint stride must be at least 1");
    }
    z0.check_dims(problem.d1(), problem.d2())?;
    if let Some(eq) = &options.equilibrium {
        eq.check_dims(problem.d1(), problem.d2())?;
    }

    let per_epoch = method.family.passes_per_epoch();
    let mut rng = SeedRng::new(seed);
    let mut ws = Workspace::new(problem.dim());
    let mut z = z0.coords().clone();
    let mut record = RunRecord {
        method: *method,
        seed,
        schedule: *schedule,
        checkpoints: Vec::new(),
        diverged: None,
    };
    let snapshot = |z: &nalgebra::DVector<f64>, pass: usize, epoch: usize| Checkpoint {
        pass_index: pass,
        epoch_index: epoch,
        grad_norm_sq: problem.grad_norm_sq(z),
        dist_sq: options
            .equilibrium
            .as_ref()
            .map(|e| (z - e.coords()).norm_squared()),
        z_snapshot: options.record_snapshots.then(|| z.as_slice().to_vec()),
    };

    record.checkpoints.push(snapshot(&z, 0, 0));
    let mut pass = 0;
    let mut epoch = 0;
    while pass + per_epoch <= budget_passes {
        let outcome = epoch_in_place(method, problem, &mut z, Steps::Schedule(schedule, epoch), &mut rng, &mut ws, None);
        epoch += 1;
        pass += per_epoch;
        let cp = match outcome {
            Ok(()) => snapshot(&z, pass, epoch),
            Err(Error::Diverged { .. }) => Checkpoint {
                pass_index: pass,
                epoch_index: epoch,
                grad_norm_sq: f64::INFINITY,
                dist_sq: options.equilibrium.as_ref().map(|_| f64::INFINITY),
                z_snapshot: None,
            },
            Err(e) => return Err(e),
        };
        if !cp.grad_norm_sq.is_finite() {
            record.checkpoints.push(Checkpoint {
                grad_norm_sq: f64::INFINITY,
                ..cp
            });
            record.diverged = Some(Divergence {
                epoch_index: epoch,
                pass_index: pass,
            });
            break;
        }
        let crossed = pass / checkpoint_stride > (pass - per_epoch) / checkpoint_stride;
        let last = pass + per_epoch > budget_passes;
        if crossed || last {
            record.checkpoints.push(cp);
        }
    }
    Ok(record)
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:e}")
    }
}

impl RunRecord {
    pub fn final_checkpoint(&self) -> &Checkpoint {
        self.checkpoints.last().expect("a record always holds the pass-0 checkpoint")
    }

    /// `grad_norm_sq` of every checkpoint divided by its pass-0 value.
    pub fn grad_norm_ratios(&self) -> Vec<(usize, f64)> {
        let base = self.checkpoints[0].grad_norm_sq;
        self.checkpoints
            .iter()
            .map(|c| (c.pass_index, c.grad_norm_sq / base))
            .collect()
    }

    pub const CSV_HEADER: &'static str = "pass,epoch,grad_norm_sq,grad_norm_sq_ratio,dist_sq";

    pub fn to_csv(&self) -> String {
        let base = self.checkpoints[0].grad_norm_sq;
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.checkpoints {
            let dist = c.dist_sq.map(fmt_float).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.pass_index,
                c.epoch_index,
                fmt_float(c.grad_norm_sq),
                fmt_float(c.grad_norm_sq / base),
                dist
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::Family;
    use crate::problems::{divergence_example, gen_monotone};

    #[test]
    fn zero_budget_single_checkpoint() {
        let prob = gen_monotone(0, 2, 2, 4).unwrap();
        let s = StepsizeSchedule::constant(0.01).unwrap();
        let r = run(&MethodSpec::new(Family::SegFf), &prob, &Point::zeros(2, 2), &s, 0, 1, 3).unwrap();
        assert_eq!(r.checkpoints.len(), 1);
        assert_eq!(r.checkpoints[0].pass_index, 0);
    }

    #[test]
    fn pass_accounting_and_stride() {
        let prob = gen_monotone(0, 2, 2, 4).unwrap();
        let s = StepsizeSchedule::constant(0.01).unwrap();
        let z = Point::zeros(2, 2);
        let r = run(&MethodSpec::new(Family::SegFfa), &prob, &z, &s, 9, 3, 3).unwrap();
        let passes: Vec<_> = r.checkpoints.iter().map(|c| c.pass_index).collect();
        assert_eq!(passes, vec![0, 4, 6, 8]);
        let r = run(&MethodSpec::new(Family::SegRr), &prob, &z, &s, 7, 3, 3).unwrap();
        let passes: Vec<_> = r.checkpoints.iter().map(|c| c.pass_index).collect();
        assert_eq!(passes, vec![0, 3, 6, 7]);
    }

    #[test]
    fn divergence_truncates() {
        let prob = gen_monotone(2, 2, 2, 4).unwrap();
        let z = Point::new(vec![1.0, 1.0, -1.0, 0.5], 2, 2).unwrap();
        let s = StepsizeSchedule::constant(1e3).unwrap();
        let r = run(&MethodSpec::new(Family::SegUs), &prob, &z, &s, 1000, 1, 0).unwrap();
        assert!(r.diverged.is_some());
        assert!(!r.final_checkpoint().grad_norm_sq.is_finite());
        assert!(r.checkpoints.len() < 1000);
        assert!(r.to_csv().lines().last().unwrap().contains("inf"));
    }

    #[test]
    fn csv_layout() {
        let prob = divergence_example(1.0).unwrap();
        let z = Point::new(vec![1.0, 0.5], 1, 1).unwrap();
        let s = StepsizeSchedule::constant(0.01).unwrap();
        let r = run(&MethodSpec::new(Family::SegRr), &prob, &z, &s, 2, 1, 0).unwrap();
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], RunRecord::CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[1].contains(",1e0,"));
    }
}
