use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Algorithm;
use crate::quantum::QueryLedger;

/// One boosting iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub t: usize,
    /// `|M^t|`.
    pub weight: f64,
    /// Empirical error of `MAJ(h_1..h_t)`; absent when driven by raw losses.
    pub empirical_error: Option<f64>,
    /// `<D^t, l^t>`.
    pub correct_mass: f64,
    /// `<D^t, l^t> - 1/2`.
    pub advantage: f64,
    /// `m * max_i D^t(x_i)`; `D^t` is `1/smoothness`-smooth.
    pub smoothness: f64,
    pub projected: bool,
    pub c_tilde: Option<f64>,
    /// `mu(M^{t+1})`.
    pub density_after: f64,
    /// Potential changes against the uniform reference, in dense-trace mode.
    pub delta_psi_update: Option<f64>,
    pub delta_psi_proj: Option<f64>,
    pub contract_ok: bool,
    /// Cumulative ledger after this iteration.
    pub ledger: QueryLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ledgers {
    pub sampling: QueryLedger,
    pub projection: QueryLedger,
    pub total: QueryLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub m: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub zeta: f64,
    /// Projection interval `K`.
    pub interval: usize,
    #[serde(rename = "T")]
    pub iterations: usize,
    #[serde(rename = "R")]
    pub projections: usize,
    pub final_error: Option<f64>,
    pub max_smoothness: f64,
    pub min_weight: f64,
    pub contract_violations: usize,
    pub ledgers: Ledgers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rows: Vec<IterationRow>,
    pub summary: RunSummary,
}

impl RunRecord {
    /// One JSON object per iteration, newline separated.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in &self.rows {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.summary).expect("summary serializes")
    }
}
