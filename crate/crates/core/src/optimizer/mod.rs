//! SMSE-based alternating optimization of the precoder and RIS loads.

mod delta;
mod metrics;
mod precoder;
mod saris;
mod state;

pub use delta::{build_delta_system, delta_system, solve_delta, DeltaOutcome, DeltaStep};
pub use metrics::{sinr, smse, smse_total, sum_rate};
pub use precoder::{optimal_precoder, regularized_precoder, stationarity_residual, Precoder};
pub use saris::{mismatched_optimize, random_baseline, saris_optimize, SarisConfig};
pub use state::{OptimizerState, StopReason};
