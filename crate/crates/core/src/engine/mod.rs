//! Boosting loops over implicit and dense measures.

mod booster;
mod config;
mod diagnostics;
mod hypothesis;
mod implicit;
mod record;
mod run;
mod trace;

pub use booster::{Booster, StepReport};
pub use config::{
    iteration_count, projection_count, projection_interval, Algorithm, BoostConfig, ContractPolicy, ProjectionMode,
    MAX_DENSE_TRACE_ENTRIES, MAX_DENSE_TRACE_M,
};
pub use diagnostics::{
    check_regret_bound, misclassified_reference, potential_diagnostics, projection_diagnostics,
    random_smooth_distribution, PotentialReport, PotentialRow, ProjectionReport, ProjectionStepReport, RegretReport,
    POTENTIAL_TOLERANCE, REGRET_TOLERANCE,
};
pub use hypothesis::{evaluate_majority, majority_from_sum, Hypothesis, LossVector, MajorityVote, Stump};
pub use implicit::{Event, ImplicitMeasure};
pub use record::{IterationRow, Ledgers, RunRecord, RunSummary};
pub use run::{run_boosting, run_kale_smoothboost, run_on_losses, run_quantumboost, RunAborted, RunOutput};
pub use trace::{DenseTrace, TraceStep};
