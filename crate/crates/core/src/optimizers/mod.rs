//! Update rules: same-sample SEG under uniform sampling, reshuffling,
//! flip-flop and anchoring, plus SGDA, DSEG and deterministic EG/EG+.

mod epoch;
mod method;
mod run;
mod schedule;
mod step;

pub use epoch::{
    run_epoch, run_epoch_traced, run_epoch_with_stepsizes, sample_permutation, StepIndices, FULL_GRADIENT,
};
pub(crate) use epoch::{epoch_in_place, Steps, Workspace};
pub use method::{AlphaRule, Family, MethodSpec, Sampling};
pub use run::{run, run_with_options, Checkpoint, Divergence, RunOptions, RunRecord};
pub use schedule::StepsizeSchedule;
pub use step::{anchor, eg_plus_step, seg_inner_step};
