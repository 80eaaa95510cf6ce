//! Experiment orchestration for the `seglab` command-line tool: configs and
//! presets, seed-deterministic runs and sweeps, verification suites, problem
//! generation and SVG charts.

pub mod config;
pub mod experiment;
pub mod gen;
pub mod plot;
pub mod verify;

pub use config::{preset, ExperimentConfig, MethodEntry, ProblemSource, ScheduleSpec};
pub use experiment::{run_experiment, run_sweep, ExperimentOutput};
pub use verify::{run_suite, Report, Suite};
