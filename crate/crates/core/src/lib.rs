//! Shuffling-based stochastic extragradient methods for finite-sum
//! quadratic saddle problems.
//!
//! [`problems`] builds the instances, [`optimizers`] runs the methods and
//! [`analysis`] measures what they do.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod optimizers;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};
pub use optimizers::{run, run_epoch, AlphaRule, Family, MethodSpec, RunRecord, StepsizeSchedule};
pub use problems::{FiniteSumProblem, Point, QuadraticComponent};
pub use rng::SeedRng;
