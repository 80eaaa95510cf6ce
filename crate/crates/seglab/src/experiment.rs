//! Runs a configured set of methods over a set of instances and aggregates
//! the gradient-norm ratios.
//!
//! Seeds: instance `i` starts from `z₀ ~ N(0, I)` drawn from stream `2i`
//! under the master seed; the run of method `m` on instance `i` samples from
//! a seed derived from stream `2i + 1` and the FNV-1a hash of `m`'s name.
//! Every cell therefore owns its stream and the output does not depend on
//! the order or the number of worker threads.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use seglab_core::optimizers::{run, MethodSpec, RunRecord, StepsizeSchedule};
use seglab_core::rng::derive_seed;
use seglab_core::{FiniteSumProblem, Point, SeedRng};

use crate::config::ExperimentConfig;

pub fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn initial_point(master_seed: u64, instance: usize, problem: &FiniteSumProblem) -> Point {
    let mut rng = SeedRng::derived(master_seed, 2 * instance as u64);
    let coords = (0..problem.dim()).map(|_| rng.normal()).collect();
    Point::new(coords, problem.d1(), problem.d2()).expect("dims match the problem")
}

pub fn run_seed(master_seed: u64, instance: usize, name: &str) -> u64 {
    derive_seed(derive_seed(master_seed, 2 * instance as u64 + 1), fnv1a(name))
}

pub(crate) fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub instance: usize,
    pub record: RunRecord,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub pass: usize,
    pub geo_mean_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub label: String,
    /// Instances whose run hit a non-finite iterate.
    pub diverged_instances: Vec<usize>,
    pub final_pass: usize,
    pub final_geo_mean_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// Method name and its aggregate series, in config order.
    pub series: Vec<(String, Vec<AggregateRow>)>,
    /// Grouped by method in config order, then by instance.
    pub runs: Vec<RunOutput>,
    pub summary: Vec<MethodSummary>,
}

impl ExperimentOutput {
    pub fn series(&self, name: &str) -> Option<&[AggregateRow]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
    }

    pub const AGGREGATE_HEADER: &'static str = "pass,method,geo_mean_ratio";

    pub fn aggregate_csv(&self) -> String {
        let mut out = format!("{}\n", Self::AGGREGATE_HEADER);
        for (name, rows) in &self.series {
            for r in rows {
                let _ = writeln!(out, "{},{},{}", r.pass, name, fmt_float(r.geo_mean_ratio));
            }
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes") + "\n"
    }
}

/// Geometric mean of per-instance ratios at every checkpoint shared by all
/// instances. The series stops after the first non-finite row.
pub fn aggregate(records: &[&RunRecord]) -> Vec<AggregateRow> {
    let ratios: Vec<Vec<(usize, f64)>> = records.iter().map(|r| r.grad_norm_ratios()).collect();
    let len = ratios.iter().map(Vec::len).min().unwrap_or(0);
    let mut rows = Vec::with_capacity(len);
    for j in 0..len {
        // divergence rows are off the stride grid
        let pass = ratios
            .iter()
            .filter(|r| !r[j].1.is_finite())
            .map(|r| r[j].0)
            .min()
            .unwrap_or(ratios[0][j].0);
        let mean_log = ratios.iter().map(|r| r[j].1.ln()).sum::<f64>() / ratios.len() as f64;
        let g = mean_log.exp();
        rows.push(AggregateRow { pass, geo_mean_ratio: g });
        if !g.is_finite() {
            break;
        }
    }
    rows
}

struct Instance {
    problem: FiniteSumProblem,
    z0: Point,
    smoothness_l: f64,
}

fn build_instances(cfg: &ExperimentConfig) -> Result<Vec<Instance>> {
    (0..cfg.instance_count)
        .map(|i| {
            let problem = cfg.problem.instance(i).with_context(|| format!("building instance {i}"))?;
            let smoothness_l = problem.spectral_report()?.smoothness_l;
            let z0 = initial_point(cfg.master_seed, i, &problem);
            Ok(Instance { problem, z0, smoothness_l })
        })
        .collect()
}

/// Runs every (method, instance) cell on the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let instances = build_instances(cfg)?;
    let mut cells: Vec<(String, MethodSpec, usize, StepsizeSchedule)> = Vec::new();
    for entry in &cfg.methods {
        let spec = entry.spec()?;
        let sched = cfg.schedule_for(entry)?;
        for (i, inst) in instances.iter().enumerate() {
            cells.push((entry.display_name().to_string(), spec, i, sched.resolve(inst.smoothness_l)?));
        }
    }
    let runs: Vec<RunOutput> = cells
        .par_iter()
        .map(|(name, spec, i, schedule)| {
            let inst = &instances[*i];
            let record = run(
                spec,
                &inst.problem,
                &inst.z0,
                schedule,
                cfg.budget_passes,
                cfg.checkpoint_stride,
                run_seed(cfg.master_seed, *i, name),
            )
            .with_context(|| format!("{name} on instance {i}"))?;
            Ok(RunOutput {
                name: name.clone(),
                instance: *i,
                record,
            })
        })
        .collect::<Result<_>>()?;

    let mut series = Vec::new();
    let mut summary = Vec::new();
    for entry in &cfg.methods {
        let name = entry.display_name();
        let mine: Vec<&RunOutput> = runs.iter().filter(|r| r.name == name).collect();
        let rows = aggregate(&mine.iter().map(|r| &r.record).collect::<Vec<_>>());
        let last = *rows.last().expect("pass 0 is always recorded");
        summary.push(MethodSummary {
            method: name.to_string(),
            label: entry.spec()?.label(),
            diverged_instances: mine.iter().filter(|r| r.record.diverged.is_some()).map(|r| r.instance).collect(),
            final_pass: last.pass,
            final_geo_mean_ratio: last.geo_mean_ratio,
        });
        series.push((name.to_string(), rows));
    }
    Ok(ExperimentOutput { series, runs, summary })
}

fn write(dir: &Path, file: &str, contents: &str) -> Result<()> {
    let path = dir.join(file);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes `config.json`, one CSV per run, `aggregate.csv` and `summary.json`.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, "config.json", &cfg.to_json())?;
    for r in &out.runs {
        write(dir, &format!("{}-inst{}.csv", r.name, r.instance), &r.record.to_csv())?;
    }
    write(dir, "aggregate.csv", &out.aggregate_csv())?;
    write(dir, "summary.json", &out.summary_json())
}

pub const SWEEP_HEADER: &str = "eta,pass,method,geo_mean_ratio";

/// One run per base stepsize in the grid; returns the long-format CSV.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<(String, Vec<(f64, ExperimentOutput)>)> {
    if cfg.stepsize_grid.is_empty() {
        bail!("stepsize grid is empty");
    }
    let mut csv = format!("{SWEEP_HEADER}\n");
    let mut cells = Vec::new();
    for &eta in &cfg.stepsize_grid {
        let mut cell = cfg.clone();
        cell.stepsize_grid.clear();
        cell.default_schedule = cfg.default_schedule.map(|s| s.with_base(eta)).transpose()?;
        for m in &mut cell.methods {
            m.schedule = m.schedule.map(|s| s.with_base(eta)).transpose()?;
        }
        let out = run_experiment(&cell).with_context(|| format!("sweep cell eta={eta}"))?;
        for (name, rows) in &out.series {
            for r in rows {
                let _ = writeln!(csv, "{},{},{},{}", fmt_float(eta), r.pass, name, fmt_float(r.geo_mean_ratio));
            }
        }
        cells.push((eta, out));
    }
    Ok((csv, cells))
}

pub fn write_sweep(dir: &Path, cfg: &ExperimentConfig, csv: &str, cells: &[(f64, ExperimentOutput)]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, "config.json", &cfg.to_json())?;
    write(dir, "sweep.csv", csv)?;
    let summary: Vec<_> = cells
        .iter()
        .map(|(eta, out)| serde_json::json!({ "eta": eta, "methods": out.summary }))
        .collect();
    write(dir, "summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GeneratorKind, MethodEntry, ProblemSource, ScheduleSpec};

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            problem: ProblemSource::Generator {
                kind: GeneratorKind::StronglyMonotone,
                seed: 3,
                d1: 3,
                d2: 3,
                n: 4,
            },
            methods: ["SEG-FFA", "SEG-US"]
                .iter()
                .map(|m| MethodEntry {
                    method: m.to_string(),
                    name: None,
                    schedule: None,
                })
                .collect(),
            default_schedule: Some(ScheduleSpec::Constant { eta: 0.01 }),
            budget_passes: 200,
            checkpoint_stride: 20,
            instance_count: 3,
            master_seed: 9,
            stepsize_grid: vec![],
            output_dir: "unused".into(),
        }
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn geo_mean_is_exp_mean_log() {
        let out = run_experiment(&small()).unwrap();
        for (name, rows) in &out.series {
            let mine: Vec<_> = out.runs.iter().filter(|r| &r.name == name).collect();
            for (j, row) in rows.iter().enumerate() {
                let logs: Vec<f64> = mine.iter().map(|r| r.record.grad_norm_ratios()[j].1.ln()).collect();
                let expect = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
                assert!((row.geo_mean_ratio - expect).abs() <= 1e-12 * expect.max(1.0));
            }
        }
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let cfg = small();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_experiment(&cfg)).unwrap();
        let b = four.install(|| run_experiment(&cfg)).unwrap();
        assert_eq!(a.aggregate_csv(), b.aggregate_csv());
    }

    #[test]
    fn single_cell_sweep_matches_run() {
        let mut cfg = small();
        cfg.stepsize_grid = vec![0.01];
        let (csv, _) = run_sweep(&cfg).unwrap();
        let run = run_experiment(&small()).unwrap().aggregate_csv();
        let stripped: Vec<String> = csv
            .lines()
            .skip(1)
            .map(|l| l.split_once(',').unwrap().1.to_string())
            .collect();
        assert_eq!(stripped, run.lines().skip(1).collect::<Vec<_>>());
    }

    #[test]
    fn divergent_series_stops_at_inf() {
        let mut cfg = small();
        cfg.default_schedule = Some(ScheduleSpec::Constant { eta: 1e3 });
        let out = run_experiment(&cfg).unwrap();
        for (_, rows) in &out.series {
            assert!(rows.last().unwrap().geo_mean_ratio.is_infinite());
            assert!(rows[..rows.len() - 1].iter().all(|r| r.geo_mean_ratio.is_finite()));
        }
        assert!(out.summary.iter().all(|s| s.diverged_instances.len() == 3));
    }
}
