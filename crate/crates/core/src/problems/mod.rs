//! Finite-sum quadratic saddle problems, their generators and the
//! numerical property checks.

mod component;
mod counterexamples;
mod generators;
mod io;
mod point;
mod problem;

pub use component::QuadraticComponent;
pub use counterexamples::{
    bilinear_xy, divergence_example, rr_lower_bound_example, variance_floor_example, LowerBoundKind,
};
pub use generators::{gen_monotone, gen_strongly_monotone, random_orthogonal};
pub use io::{ComponentDoc, ProblemDoc};
pub use point::Point;
pub use problem::{FiniteSumProblem, SpectralReport, VarianceParams};
