use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{amplitude_estimate, QueryLedger};
use crate::error::{Error, Result};
use crate::measure::compensated_sum;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMode {
    /// Reads every value; returns the mean exactly.
    ExactPass,
    /// Bernstein-sized uniform sampling.
    MonteCarlo,
    /// Amplitude estimation on the controlled-rotation state, `mu_hat = lambda^2`.
    SimulatedQuantum,
}

impl std::str::FromStr for EstimatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-pass" => Ok(Self::ExactPass),
            "monte-carlo" | "mc" => Ok(Self::MonteCarlo),
            "quantum" | "simulated-quantum" => Ok(Self::SimulatedQuantum),
            other => Err(Error::Config(format!("unknown estimator mode `{other}`"))),
        }
    }
}

/// Amplitude-estimation precision `A` used for multiplicative error `zeta`
/// under the promise `mu >= mu_floor`: the smallest power of two with
/// `1/A <= sqrt(mu_floor) * zeta / 2`.
pub fn precision_for(mu_floor: f64, zeta: f64) -> u64 {
    let needed = 2.0 / (mu_floor.sqrt() * zeta);
    (needed.ceil() as u64).max(2).next_power_of_two()
}

/// Estimates the mean of values in `[0, 1]` to multiplicative error `zeta`
/// with probability `1 - delta`, given the promise `mu >= mu_floor`.
#[derive(Debug, Clone)]
pub struct MeanEstimator {
    mode: EstimatorMode,
    zeta: f64,
    delta: f64,
    mu_floor: f64,
    strict_floor: bool,
    floor_violations: u64,
    ledger: QueryLedger,
    rng: StreamRng,
}

impl MeanEstimator {
    pub fn new(mode: EstimatorMode, zeta: f64, delta: f64, mu_floor: f64, rng: StreamRng) -> Result<Self> {
        validate(zeta, delta)?;
        if !(mu_floor > 0.0 && mu_floor <= 1.0) {
            return Err(Error::Config(format!("mu_floor must lie in (0, 1], got {mu_floor}")));
        }
        Ok(Self {
            mode,
            zeta,
            delta,
            mu_floor,
            strict_floor: false,
            floor_violations: 0,
            ledger: QueryLedger::new(),
            rng,
        })
    }

    /// In exact-pass mode, report a mean below `mu_floor` as
    /// [`Error::FloorViolation`] instead of only counting it.
    pub fn with_strict_floor(mut self, strict: bool) -> Self {
        self.strict_floor = strict;
        self
    }

    pub fn mode(&self) -> EstimatorMode {
        self.mode
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mu_floor(&self) -> f64 {
        self.mu_floor
    }

    pub fn set_mu_floor(&mut self, mu_floor: f64) {
        self.mu_floor = mu_floor;
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// Exact-pass calls whose true mean fell below the floor.
    pub fn floor_violations(&self) -> u64 {
        self.floor_violations
    }

    pub fn estimate(&mut self, values: &dyn Fn(usize) -> f64, n: usize) -> Result<f64> {
        self.estimate_with(values, n, self.zeta, self.delta)
    }

    /// As [`estimate`](Self::estimate) with per-call error parameters.
    pub fn estimate_with(&mut self, values: &dyn Fn(usize) -> f64, n: usize, zeta: f64, delta: f64) -> Result<f64> {
        validate(zeta, delta)?;
        if n == 0 {
            return Err(Error::Config("cannot estimate the mean of zero values".into()));
        }
        match self.mode {
            EstimatorMode::ExactPass => {
                self.ledger.charge_oracle_queries(n as u64);
                let mu = compensated_sum((0..n).map(values)) / n as f64;
                if mu < self.mu_floor {
                    self.floor_violations += 1;
                    if self.strict_floor {
                        return Err(Error::FloorViolation {
                            reason: format!("mean {mu} below promised floor {}", self.mu_floor),
                        });
                    }
                }
                Ok(mu)
            }
            EstimatorMode::MonteCarlo => {
                let samples = (3.0 * (2.0 / delta).ln() / (self.mu_floor * zeta * zeta)).ceil() as u64;
                self.ledger.charge_oracle_queries(samples);
                let rng = &mut self.rng;
                let total = compensated_sum((0..samples).map(|_| values(rng.gen_range(0..n))));
                Ok(total / samples as f64)
            }
            EstimatorMode::SimulatedQuantum => {
                // The simulator computes the amplitude of the flag-1 branch
                // directly; only the amplitude-estimation cost is charged.
                let a = (compensated_sum((0..n).map(values)) / n as f64).clamp(0.0, 1.0);
                let precision = precision_for(self.mu_floor, zeta);
                let lambda = amplitude_estimate(a, precision, delta, &mut self.rng, &mut self.ledger);
                Ok(lambda * lambda)
            }
        }
    }
}

fn validate(zeta: f64, delta: f64) -> Result<()> {
    if !(zeta > 0.0 && zeta < 0.5) {
        return Err(Error::Config(format!("zeta must lie in (0, 0.5), got {zeta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}
