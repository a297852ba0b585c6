//! Smooth boosting with lazy Bregman projections onto high-density
//! measures, implicit weight representations, and simulated quantum
//! mean estimation with query accounting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bregman;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod learners;
pub mod measure;
pub mod quantum;
pub mod rng;
pub mod tasks;

pub use bregman::{
    exact_projection_constant, project_approx, project_exact, DensityTarget, ImplicitProjection,
};
pub use dataset::{Label, TrainingSet};
pub use engine::{
    run_boosting, run_kale_smoothboost, run_quantumboost, Algorithm, BoostConfig, Hypothesis, LossVector,
    MajorityVote, RunRecord,
};
pub use error::{Error, Result};
pub use learners::{PlantedLearner, PlantedLearnerConfig, StumpLearner, WeakLearner};
pub use measure::{Measure, SmoothDistribution};
pub use quantum::{EstimatorMode, MeanEstimator, QueryLedger};
pub use tasks::{SyntheticTask, TaskKind, TaskSpec};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// errors name the offending line.
pub fn parse_kv_lines(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected `key = value`, got `{line}`", no + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", no + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}
