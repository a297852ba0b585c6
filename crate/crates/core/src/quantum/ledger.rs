use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// Counters separating classical work from modeled quantum cost.
///
/// `oracle_queries` counts classical entry queries, `grover_applications`
/// counts simulated applications of the amplitude-estimation operator,
/// `samples_drawn` counts rejection-sampling proposals and
/// `modeled_quantum_cost` accumulates the query cost the quantum routines
/// would incur.
#[derive(Debug, Default, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryLedger {
    oracle_queries: u64,
    grover_applications: u64,
    samples_drawn: u64,
    modeled_quantum_cost: f64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn oracle_queries(&self) -> u64 {
        self.oracle_queries
    }

    pub fn grover_applications(&self) -> u64 {
        self.grover_applications
    }

    pub fn samples_drawn(&self) -> u64 {
        self.samples_drawn
    }

    pub fn modeled_quantum_cost(&self) -> f64 {
        self.modeled_quantum_cost
    }

    pub fn charge_oracle_queries(&mut self, n: u64) {
        self.oracle_queries += n;
    }

    pub fn charge_grover(&mut self, n: u64) {
        self.grover_applications += n;
    }

    pub fn charge_samples(&mut self, n: u64) {
        self.samples_drawn += n;
    }

    pub fn charge_modeled_cost(&mut self, cost: f64) {
        debug_assert!(cost >= 0.0);
        self.modeled_quantum_cost += cost.max(0.0);
    }

    /// Field-wise difference `self - earlier`.
    pub fn since(&self, earlier: &QueryLedger) -> QueryLedger {
        QueryLedger {
            oracle_queries: self.oracle_queries - earlier.oracle_queries,
            grover_applications: self.grover_applications - earlier.grover_applications,
            samples_drawn: self.samples_drawn - earlier.samples_drawn,
            modeled_quantum_cost: self.modeled_quantum_cost - earlier.modeled_quantum_cost,
        }
    }
}

impl AddAssign<&QueryLedger> for QueryLedger {
    fn add_assign(&mut self, rhs: &QueryLedger) {
        self.oracle_queries += rhs.oracle_queries;
        self.grover_applications += rhs.grover_applications;
        self.samples_drawn += rhs.samples_drawn;
        self.modeled_quantum_cost += rhs.modeled_quantum_cost;
    }
}
