//! `seglab gen`: problem instances serialized to `{tag}-{seed}.json`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use seglab_core::problems::{gen_monotone, gen_strongly_monotone};
use seglab_core::FiniteSumProblem;

use crate::config::Counterexample;

#[derive(Debug, Clone, PartialEq)]
pub enum GenRequest {
    Monotone { seed: u64, d1: usize, d2: usize, n: usize },
    StronglyMonotone { seed: u64, d1: usize, d2: usize, n: usize },
    Counterexample { example: Counterexample, seed: u64 },
}

impl GenRequest {
    pub fn tag(&self) -> &'static str {
        match self {
            GenRequest::Monotone { .. } => "monotone",
            GenRequest::StronglyMonotone { .. } => "strongly-monotone",
            GenRequest::Counterexample { example, .. } => example.tag(),
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            GenRequest::Monotone { seed, .. }
            | GenRequest::StronglyMonotone { seed, .. }
            | GenRequest::Counterexample { seed, .. } => seed,
        }
    }

    pub fn build(&self) -> Result<FiniteSumProblem> {
        Ok(match *self {
            GenRequest::Monotone { seed, d1, d2, n } | GenRequest::StronglyMonotone { seed, d1, d2, n } => {
                if n % 2 != 0 {
                    bail!("invalid argument: n must be even (got {n})");
                }
                if matches!(self, GenRequest::Monotone { .. }) {
                    gen_monotone(seed, d1, d2, n)?
                } else {
                    gen_strongly_monotone(seed, d1, d2, n)?
                }
            }
            GenRequest::Counterexample { ref example, .. } => example.build()?,
        })
    }
}

/// Writes the instance into `dir` and returns its path.
pub fn generate(req: &GenRequest, dir: &Path) -> Result<PathBuf> {
    let problem = req.build()?;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{}-{}.json", req.tag(), req.seed()));
    std::fs::write(&path, problem.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
