//! Batch execution, streaming statistics, references and parameter studies.

mod batch;
mod stats;
mod study;

pub use batch::{run_batch, run_estimator, run_values, Estimator, CHUNK_SIZE};
pub use stats::{running_moment_drift, EstimateStats, CI99_MULTIPLIER};
pub use study::{
    compute_reference, efficiency_curve, sweep, time_to_target, EfficiencyConfig, EfficiencyPoint, Problem, Reference,
    SweepParam, SweepResult, TargetOutcome,
};
