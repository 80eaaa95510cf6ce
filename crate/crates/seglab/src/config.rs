//! Experiment configuration: JSON file, presets and flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use seglab_core::optimizers::{MethodSpec, StepsizeSchedule};
use seglab_core::problems::{
    bilinear_xy, divergence_example, gen_monotone, gen_strongly_monotone, rr_lower_bound_example,
    variance_floor_example, LowerBoundKind,
};
use seglab_core::FiniteSumProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Monotone,
    StronglyMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Counterexample {
    Divergence {
        l: f64,
    },
    VarianceFloor {
        l: f64,
        sigma: f64,
    },
    RrLowerBound {
        l: f64,
        mu: f64,
        sigma: f64,
        n: usize,
        #[serde(default)]
        sgda: bool,
    },
    Bilinear,
}

impl Counterexample {
    pub fn tag(&self) -> &'static str {
        match self {
            Counterexample::Divergence { .. } => "divergence",
            Counterexample::VarianceFloor { .. } => "variance-floor",
            Counterexample::RrLowerBound { .. } => "rr-lower-bound",
            Counterexample::Bilinear => "bilinear",
        }
    }

    pub fn build(&self) -> Result<FiniteSumProblem> {
        Ok(match *self {
            Counterexample::Divergence { l } => divergence_example(l)?,
            Counterexample::VarianceFloor { l, sigma } => variance_floor_example(l, sigma)?,
            Counterexample::RrLowerBound { l, mu, sigma, n, sgda } => {
                let kind = if sgda { LowerBoundKind::Sgda } else { LowerBoundKind::Seg };
                rr_lower_bound_example(l, mu, sigma, n, kind)?
            }
            Counterexample::Bilinear => bilinear_xy(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ProblemSource {
    /// Instance `i` uses generator seed `seed + i`.
    Generator {
        kind: GeneratorKind,
        seed: u64,
        d1: usize,
        d2: usize,
        n: usize,
    },
    File {
        path: PathBuf,
    },
    Counterexample {
        #[serde(flatten)]
        example: Counterexample,
    },
}

impl ProblemSource {
    pub fn instance(&self, index: usize) -> Result<FiniteSumProblem> {
        match self {
            ProblemSource::Generator { kind, seed, d1, d2, n } => {
                let s = seed.wrapping_add(index as u64);
                Ok(match kind {
                    GeneratorKind::Monotone => gen_monotone(s, *d1, *d2, *n)?,
                    GeneratorKind::StronglyMonotone => gen_strongly_monotone(s, *d1, *d2, *n)?,
                })
            }
            ProblemSource::File { path } => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading problem file {}", path.display()))?;
                Ok(FiniteSumProblem::from_json(&text)?)
            }
            ProblemSource::Counterexample { example } => example.build(),
        }
    }
}

/// Stepsize rule as written in a config. Resolved per instance because some
/// rules depend on the instance's smoothness constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleSpec {
    Constant {
        eta: f64,
    },
    PolyDecay {
        eta0: f64,
        shift: f64,
        exponent: f64,
    },
    /// Poly-decay with `eta0 = min{cap, 1/L}`.
    PolyDecayCapped {
        cap: f64,
        shift: f64,
        exponent: f64,
    },
    DsegDual {
        gamma0: f64,
        eta0: f64,
        r1: f64,
        r2: f64,
        offset: f64,
    },
    DsegBilinear,
    DsegGeneral,
}

impl ScheduleSpec {
    pub fn resolve(&self, smoothness_l: f64) -> Result<StepsizeSchedule> {
        let s = match *self {
            ScheduleSpec::Constant { eta } => StepsizeSchedule::Constant { eta },
            ScheduleSpec::PolyDecay { eta0, shift, exponent } => StepsizeSchedule::PolyDecay { eta0, shift, exponent },
            ScheduleSpec::PolyDecayCapped { cap, shift, exponent } => StepsizeSchedule::PolyDecay {
                eta0: cap.min(1.0 / smoothness_l),
                shift,
                exponent,
            },
            ScheduleSpec::DsegDual { gamma0, eta0, r1, r2, offset } => StepsizeSchedule::DsegDual {
                gamma0,
                eta0,
                r1,
                r2,
                offset,
            },
            ScheduleSpec::DsegBilinear => StepsizeSchedule::dseg_bilinear(),
            ScheduleSpec::DsegGeneral => StepsizeSchedule::dseg_general(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Same rule with its base stepsize replaced by `eta`.
    pub fn with_base(&self, eta: f64) -> Result<Self> {
        Ok(match *self {
            ScheduleSpec::Constant { .. } => ScheduleSpec::Constant { eta },
            ScheduleSpec::PolyDecay { shift, exponent, .. } | ScheduleSpec::PolyDecayCapped { shift, exponent, .. } => {
                ScheduleSpec::PolyDecay { eta0: eta, shift, exponent }
            }
            _ => bail!("dual-stepsize schedules have no single base stepsize"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    /// Method label such as `SEG-FFA` or `SEG-RRA-half`.
    pub method: String,
    /// Series name in outputs; defaults to `method`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
}

impl MethodEntry {
    pub fn spec(&self) -> Result<MethodSpec> {
        Ok(self.method.parse()?)
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub methods: Vec<MethodEntry>,
    /// Used by methods without their own schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_schedule: Option<ScheduleSpec>,
    pub budget_passes: usize,
    pub checkpoint_stride: usize,
    #[serde(default = "default_instances")]
    pub instance_count: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Base stepsizes for `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stepsize_grid: Vec<f64>,
    pub output_dir: PathBuf,
}

fn default_instances() -> usize {
    5
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("no methods configured");
        }
        if self.instance_count == 0 {
            bail!("instance_count must be at least 1");
        }
        if self.checkpoint_stride == 0 {
            bail!("checkpoint_stride must be at least 1");
        }
        let mut names = std::collections::BTreeSet::new();
        for m in &self.methods {
            m.spec()?;
            if !names.insert(m.display_name()) {
                bail!("duplicate method name {}; set \"name\" to tell them apart", m.display_name());
            }
            if m.schedule.is_none() && self.default_schedule.is_none() {
                bail!("method {} has no schedule", m.method);
            }
        }
        Ok(())
    }

    pub fn schedule_for(&self, entry: &MethodEntry) -> Result<ScheduleSpec> {
        entry
            .schedule
            .or(self.default_schedule)
            .with_context(|| format!("method {} has no schedule", entry.method))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

fn entries(labels: &[&str], schedule: Option<ScheduleSpec>) -> Vec<MethodEntry> {
    labels
        .iter()
        .map(|m| MethodEntry {
            method: m.to_string(),
            name: None,
            schedule,
        })
        .collect()
}

pub const PRESETS: [&str; 5] = ["monotone", "strongly-monotone", "ablation", "dseg", "sweep-strongly-monotone"];

const MONOTONE_SCHEDULE: ScheduleSpec = ScheduleSpec::PolyDecayCapped {
    cap: 0.01,
    shift: 10.0,
    exponent: 0.34,
};

/// Built-in protocols. `fast` shortens the horizon for CI.
pub fn preset(name: &str, fast: bool) -> Result<ExperimentConfig> {
    let monotone = ProblemSource::Generator {
        kind: GeneratorKind::Monotone,
        seed: 0,
        d1: 20,
        d2: 20,
        n: 40,
    };
    let strongly = ProblemSource::Generator {
        kind: GeneratorKind::StronglyMonotone,
        seed: 0,
        d1: 20,
        d2: 20,
        n: 40,
    };
    let (monotone_budget, strongly_budget) = if fast { (10_000, 10_000) } else { (100_000, 30_000) };
    let cfg = match name {
        "monotone" => ExperimentConfig {
            problem: monotone,
            methods: entries(&["SEG-FFA", "SEG-FF", "SEG-RR", "SEG-US"], None),
            default_schedule: Some(MONOTONE_SCHEDULE),
            budget_passes: monotone_budget,
            checkpoint_stride: monotone_budget / 200,
            instance_count: 5,
            master_seed: 0,
            stepsize_grid: vec![],
            output_dir: PathBuf::from("out/monotone"),
        },
        "strongly-monotone" => ExperimentConfig {
            problem: strongly,
            methods: entries(&["SEG-FFA", "SEG-FF", "SEG-RR", "SEG-US", "SGDA-RR", "SGDA-US"], None),
            default_schedule: Some(ScheduleSpec::Constant { eta: 1e-3 }),
            budget_passes: strongly_budget,
            checkpoint_stride: strongly_budget / 200,
            instance_count: 5,
            master_seed: 0,
            stepsize_grid: vec![],
            output_dir: PathBuf::from("out/strongly-monotone"),
        },
        "ablation" => ExperimentConfig {
            problem: monotone,
            methods: entries(
                &["SEG-FFA", "SEG-RRA", "SEG-RRA-half", "SEG-USA", "SEG-USA-half"],
                None,
            ),
            default_schedule: Some(MONOTONE_SCHEDULE),
            budget_passes: monotone_budget,
            checkpoint_stride: monotone_budget / 200,
            instance_count: 5,
            master_seed: 0,
            stepsize_grid: vec![],
            output_dir: PathBuf::from("out/ablation"),
        },
        "dseg" => ExperimentConfig {
            problem: monotone,
            methods: vec![
                MethodEntry {
                    method: "SEG-FFA".into(),
                    name: None,
                    schedule: Some(MONOTONE_SCHEDULE),
                },
                MethodEntry {
                    method: "DSEG".into(),
                    name: Some("DSEG-bilinear".into()),
                    schedule: Some(ScheduleSpec::DsegBilinear),
                },
                MethodEntry {
                    method: "DSEG".into(),
                    name: Some("DSEG-general".into()),
                    schedule: Some(ScheduleSpec::DsegGeneral),
                },
            ],
            default_schedule: None,
            budget_passes: monotone_budget,
            checkpoint_stride: monotone_budget / 200,
            instance_count: 5,
            master_seed: 0,
            stepsize_grid: vec![],
            output_dir: PathBuf::from("out/dseg"),
        },
        "sweep-strongly-monotone" => ExperimentConfig {
            problem: strongly,
            methods: entries(&["SEG-FFA", "SEG-FF", "SEG-RR", "SEG-US", "SGDA-RR", "SGDA-US"], None),
            default_schedule: Some(ScheduleSpec::Constant { eta: 1e-3 }),
            budget_passes: strongly_budget,
            checkpoint_stride: strongly_budget / 200,
            instance_count: 5,
            master_seed: 0,
            stepsize_grid: vec![1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3],
            output_dir: PathBuf::from("out/sweep"),
        },
        other => bail!("unknown preset '{other}' (known: {})", PRESETS.join(", ")),
    };
    Ok(cfg)
}
