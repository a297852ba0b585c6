//! Classically simulated quantum subroutines with query accounting.

mod amplitude;
mod estimator;
mod ledger;
mod sampler;
mod statevector;

pub use amplitude::{amplitude_estimate, grid_size, median_repetitions, outcome_distribution};
pub use estimator::{precision_for, EstimatorMode, MeanEstimator};
pub use ledger::QueryLedger;
pub use sampler::{prepare_smooth_sample, sample_cost};
pub use statevector::{discretize, statevector_crosscheck, MAX_STATEVECTOR_BITS, MAX_STATEVECTOR_SIZE};
