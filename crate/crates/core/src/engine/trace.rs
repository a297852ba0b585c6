use serde::{Deserialize, Serialize};

use super::LossVector;

/// One recorded update: the loss applied to `M^t` and the projection
/// constant used to obtain `M^{t+1}`, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub loss: LossVector,
    pub c_tilde: Option<f64>,
}

/// Materialized trajectory `M^1..M^{T+1}` of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseTrace {
    pub gamma: f64,
    pub epsilon: f64,
    /// Precision the projections were certified to; zero for exact ones.
    pub zeta_effective: f64,
    pub measures: Vec<Vec<f64>>,
    pub steps: Vec<TraceStep>,
}

impl DenseTrace {
    pub fn new(m_one: Vec<f64>, gamma: f64, epsilon: f64, zeta_effective: f64) -> Self {
        Self {
            gamma,
            epsilon,
            zeta_effective,
            measures: vec![m_one],
            steps: Vec::new(),
        }
    }

    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn m(&self) -> usize {
        self.measures[0].len()
    }

    /// `M^t`, `t` counted from 1.
    pub fn measure(&self, t: usize) -> &[f64] {
        &self.measures[t - 1]
    }

    /// `N^{t+1} = M^t (1 - gamma)^{l^t}`.
    pub fn pre_projection(&self, t: usize) -> Vec<f64> {
        let decay = 1.0 - self.gamma;
        self.measures[t - 1]
            .iter()
            .zip(self.steps[t - 1].loss.bits())
            .map(|(&v, &l)| if l { v * decay } else { v })
            .collect()
    }

    pub fn projections(&self) -> usize {
        self.steps.iter().filter(|s| s.c_tilde.is_some()).count()
    }
}
