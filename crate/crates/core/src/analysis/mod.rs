//! Numerical verifiers: exact expected epoch operators, within-epoch error
//! order, second-moment recursions, Φ moments, noise floors and Monte-Carlo
//! estimates with standard errors.

mod checks;
mod error_order;
mod growth;
mod montecarlo;
mod noise;
mod phi;
mod recursions;
mod stats;

pub use checks::CheckRecord;
pub use error_order::{
    epoch_error, fit_error_order, fit_error_order_detailed, matched_beta, EpochErrorSample, ErrorOrderFit,
};
pub use growth::{
    exact_expected_growth, expected_second_moment_operator, expected_us_epoch_operator, permutations,
    step_matrix, MAX_ENUMERATED_N,
};
pub use montecarlo::{mc_expected_sq_norm, mc_expected_sq_norm_with_stepsizes, McReport};
pub use noise::{default_burn_in, noise_floor};
pub use phi::{phi_lower_bound_shape, phi_moments, phi_sample, PhiMode, MAX_ENUMERATED_PHI_N};
pub use recursions::{
    phi_second_moment_closed_form, rr_lower_bound_nu, segrr_lower_bound_recursion, segus_floor_recursion,
    FloorRecursion,
};
pub use stats::{log_log_slope, ols, MomentEstimate};
