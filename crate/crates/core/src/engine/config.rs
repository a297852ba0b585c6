use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::EstimatorMode;

/// Largest `m * (T + 1)` entry count a dense trace may hold.
pub const MAX_DENSE_TRACE_ENTRIES: usize = 50_000_000;
/// Largest training set for which dense tracing is allowed.
pub const MAX_DENSE_TRACE_M: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Dense measure, exact projection after every update.
    Kale,
    /// Implicit measure, approximate projection every `K` updates.
    #[serde(rename = "quantumboost")]
    QuantumBoost,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kale" | "smoothboost" => Ok(Algorithm::Kale),
            "quantumboost" | "qb" => Ok(Algorithm::QuantumBoost),
            other => Err(Error::Config(format!("unknown algorithm `{other}` (expected kale or quantumboost)"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Kale => "kale",
            Algorithm::QuantumBoost => "quantumboost",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionMode {
    /// Binary search on `c` driven by the mean estimator.
    Approximate,
    /// Closed-form constant from the materialized measure.
    Exact,
}

impl FromStr for ProjectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "approximate" | "approx" => Ok(ProjectionMode::Approximate),
            "exact" => Ok(ProjectionMode::Exact),
            other => Err(Error::Config(format!("unknown projection mode `{other}`"))),
        }
    }
}

/// What to do when a weak hypothesis misses `1/2 + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContractPolicy {
    #[default]
    Abort,
    Warn,
}

impl FromStr for ContractPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abort" => Ok(ContractPolicy::Abort),
            "warn" => Ok(ContractPolicy::Warn),
            other => Err(Error::Config(format!("unknown contract policy `{other}`"))),
        }
    }
}

/// `T = floor(4 ln(1/eps) / gamma^2) + 1`.
pub fn iteration_count(gamma: f64, epsilon: f64) -> usize {
    (4.0 * (1.0 / epsilon).ln() / (gamma * gamma)).floor() as usize + 1
}

/// `K = ceil(1/gamma)`, robust to `1/gamma` landing a hair above an integer.
pub fn projection_interval(gamma: f64) -> usize {
    ((1.0 / gamma) - 1e-9).ceil().max(1.0) as usize
}

/// Projections made in `t` iterations at interval `k`: `ceil(t / k)`.
pub fn projection_count(t: usize, k: usize) -> usize {
    t.div_ceil(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub algorithm: Algorithm,
    pub gamma: f64,
    pub epsilon: f64,
    /// Total failure budget, split evenly over the projections.
    pub delta: f64,
    pub iterations: Option<usize>,
    pub interval: Option<usize>,
    pub zeta: Option<f64>,
    pub projection: ProjectionMode,
    pub estimator: EstimatorMode,
    pub contract: ContractPolicy,
    pub dense_trace: bool,
    pub seed: u64,
}

impl BoostConfig {
    pub fn new(algorithm: Algorithm, gamma: f64, epsilon: f64) -> Self {
        Self {
            algorithm,
            gamma,
            epsilon,
            delta: 0.1,
            iterations: None,
            interval: None,
            zeta: None,
            projection: ProjectionMode::Approximate,
            estimator: EstimatorMode::SimulatedQuantum,
            contract: ContractPolicy::Abort,
            dense_trace: false,
            seed: 0,
        }
    }

    pub fn kale(gamma: f64, epsilon: f64) -> Self {
        Self::new(Algorithm::Kale, gamma, epsilon)
    }

    pub fn quantumboost(gamma: f64, epsilon: f64) -> Self {
        Self::new(Algorithm::QuantumBoost, gamma, epsilon)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_estimator(mut self, mode: EstimatorMode) -> Self {
        self.estimator = mode;
        self
    }

    pub fn with_projection(mut self, mode: ProjectionMode) -> Self {
        self.projection = mode;
        self
    }

    pub fn with_iterations(mut self, t: usize) -> Self {
        self.iterations = Some(t);
        self
    }

    pub fn with_interval(mut self, k: usize) -> Self {
        self.interval = Some(k);
        self
    }

    pub fn with_dense_trace(mut self, on: bool) -> Self {
        self.dense_trace = on;
        self
    }

    pub fn with_contract(mut self, policy: ContractPolicy) -> Self {
        self.contract = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(Error::Config(format!("gamma must lie in (0, 0.5), got {}", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.iterations == Some(0) {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.interval == Some(0) {
            return Err(Error::Config("projection interval must be at least 1".into()));
        }
        if let Some(z) = self.zeta {
            if !(z > 0.0 && z < 0.5) {
                return Err(Error::Config(format!("zeta must lie in (0, 0.5), got {z}")));
            }
        }
        Ok(())
    }

    pub fn iterations(&self) -> usize {
        self.iterations.unwrap_or_else(|| iteration_count(self.gamma, self.epsilon))
    }

    /// `K`; always 1 for the eager baseline.
    pub fn interval(&self) -> usize {
        match self.algorithm {
            Algorithm::Kale => 1,
            Algorithm::QuantumBoost => self.interval.unwrap_or_else(|| projection_interval(self.gamma)),
        }
    }

    /// Projection precision; zero for exact projections.
    pub fn zeta(&self) -> f64 {
        self.zeta.unwrap_or(self.gamma / 4.0)
    }

    pub fn projection_mode(&self) -> ProjectionMode {
        match self.algorithm {
            Algorithm::Kale => ProjectionMode::Exact,
            Algorithm::QuantumBoost => self.projection,
        }
    }

    pub fn zeta_effective(&self) -> f64 {
        match self.projection_mode() {
            ProjectionMode::Exact => 0.0,
            ProjectionMode::Approximate => self.zeta(),
        }
    }

    pub fn expected_projections(&self) -> usize {
        projection_count(self.iterations(), self.interval())
    }

    /// Guaranteed lower bound on `|M^t|`: `eps m (1 - gamma)^K`.
    pub fn weight_floor(&self, m: usize) -> f64 {
        self.epsilon * m as f64 * (1.0 - self.gamma).powi(self.interval() as i32)
    }

    /// Weight bound used to cost sample preparation from `M^t`. The eager
    /// baseline samples right after a projection, so `eps m` holds.
    pub fn sampling_floor(&self, m: usize) -> f64 {
        match self.algorithm {
            Algorithm::Kale => self.epsilon * m as f64,
            Algorithm::QuantumBoost => self.weight_floor(m),
        }
    }
}
