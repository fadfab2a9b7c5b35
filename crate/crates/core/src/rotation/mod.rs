//! Continued fractions, rotation numbers, and tuning to a target rotation number.

pub mod cf;
pub mod tune;

pub use cf::{cf_value, convergents, rho_value, ContinuedFraction, ConvergentTable};
pub use tune::{
    check_closest_returns, closest_returns, rotation_number_estimate, tune_from, tune_parameter,
    TunedMap, TUNE_GUARD_LEVELS,
};
