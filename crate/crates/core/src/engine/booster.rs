use super::config::{Algorithm, BoostConfig, ProjectionMode, MAX_DENSE_TRACE_ENTRIES, MAX_DENSE_TRACE_M};
use super::{DenseTrace, ImplicitMeasure, LossVector, TraceStep};
use crate::bregman::{exact_projection_constant_entries, project_approx, DensityTarget, ImplicitProjection};
use crate::error::{Error, Result};
use crate::measure::{compensated_sum, normalize_entries, relative_entropy};
use crate::measure::SmoothDistribution;
use crate::quantum::{MeanEstimator, QueryLedger};
use crate::rng::substream;

/// Outcome of one boosting update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub t: usize,
    /// `|M^t|`.
    pub weight: f64,
    /// `<D^t, l^t>`.
    pub correct_mass: f64,
    /// `m * max_i D^t(x_i)`.
    pub smoothness: f64,
    pub projected: bool,
    pub c_tilde: Option<f64>,
    pub projection: Option<ImplicitProjection>,
    /// `|M^{t+1}| / m`.
    pub density_after: f64,
    /// Potential changes against the uniform reference (dense-trace mode).
    pub delta_psi_update: Option<f64>,
    pub delta_psi_proj: Option<f64>,
}

/// The measure-update state machine shared by both algorithms. It keeps
/// the implicit representation as the source of truth and a dense cache
/// produced by the same floating-point operations in the same order, so
/// the two agree bit for bit.
pub struct Booster {
    config: BoostConfig,
    m: usize,
    total: usize,
    interval: usize,
    decay: f64,
    mode: ProjectionMode,
    target: Option<DensityTarget>,
    implicit: ImplicitMeasure,
    cache: Vec<f64>,
    estimator: Option<MeanEstimator>,
    ledger: QueryLedger,
    per_projection_delta: f64,
    t: usize,
    projections: usize,
    trace: Option<DenseTrace>,
}

impl Booster {
    pub fn new(m: usize, config: &BoostConfig) -> Result<Self> {
        config.validate()?;
        if m == 0 {
            return Err(Error::Config("training set is empty".into()));
        }
        let total = config.iterations();
        if config.dense_trace && (m > MAX_DENSE_TRACE_M || m.saturating_mul(total + 1) > MAX_DENSE_TRACE_ENTRIES) {
            return Err(Error::SizeLimit {
                reason: format!("dense trace of m = {m} over {total} iterations is too large"),
            });
        }
        let mode = config.projection_mode();
        let zeta = config.zeta();
        let (target, estimator) = match mode {
            ProjectionMode::Exact => (None, None),
            ProjectionMode::Approximate => {
                let target = DensityTarget::new(config.epsilon, zeta)?;
                let est = MeanEstimator::new(
                    config.estimator,
                    zeta,
                    config.delta,
                    config.epsilon / 2.0,
                    substream(config.seed, "estimator"),
                )?;
                (Some(target), Some(est))
            }
        };
        let implicit = ImplicitMeasure::new(m, config.epsilon, config.gamma);
        let cache = vec![config.epsilon; m];
        let trace = config
            .dense_trace
            .then(|| DenseTrace::new(cache.clone(), config.gamma, config.epsilon, config.zeta_effective()));
        Ok(Self {
            config: config.clone(),
            m,
            total,
            interval: config.interval(),
            decay: 1.0 - config.gamma,
            mode,
            target,
            implicit,
            cache,
            estimator,
            ledger: QueryLedger::new(),
            per_projection_delta: config.delta / config.expected_projections() as f64,
            t: 0,
            projections: 0,
            trace,
        })
    }

    pub fn config(&self) -> &BoostConfig {
        &self.config
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Iterations completed so far.
    pub fn completed(&self) -> usize {
        self.t
    }

    pub fn total_iterations(&self) -> usize {
        self.total
    }

    pub fn projections(&self) -> usize {
        self.projections
    }

    /// Dense copy of the current measure `M^{t}`.
    pub fn measure(&self) -> &[f64] {
        &self.cache
    }

    pub fn implicit(&self) -> &ImplicitMeasure {
        &self.implicit
    }

    pub fn trace(&self) -> Option<&DenseTrace> {
        self.trace.as_ref()
    }

    pub fn into_parts(self) -> (ImplicitMeasure, Option<DenseTrace>) {
        (self.implicit, self.trace)
    }

    pub fn weight(&self) -> f64 {
        compensated_sum(self.cache.iter().copied())
    }

    /// `D^t = M^t / |M^t|`.
    pub fn distribution(&self) -> Vec<f64> {
        let w = self.weight();
        self.cache.iter().map(|v| v / w).collect()
    }

    /// Queries spent on projections: exact passes plus estimator work.
    pub fn projection_ledger(&self) -> QueryLedger {
        let mut total = self.ledger;
        if let Some(est) = &self.estimator {
            total += est.ledger();
        }
        total
    }

    pub fn estimator_floor_violations(&self) -> u64 {
        self.estimator.as_ref().map_or(0, |e| e.floor_violations())
    }

    /// True when iteration `t` (from 1) ends with a projection.
    pub fn projects_at(&self, t: usize) -> bool {
        match self.config.algorithm {
            Algorithm::Kale => true,
            Algorithm::QuantumBoost => t.is_multiple_of(self.interval) || t == self.total,
        }
    }

    /// Applies `l^t` to `M^t`, projecting on schedule, and returns the
    /// diagnostics of the step.
    pub fn step(&mut self, loss: LossVector) -> Result<StepReport> {
        if loss.len() != self.m {
            return Err(Error::LengthMismatch {
                left: loss.len(),
                right: self.m,
            });
        }
        let t = self.t + 1;
        let weight = self.weight();
        let correct = compensated_sum(self.cache.iter().zip(loss.bits()).filter(|(_, &l)| l).map(|(v, _)| *v));
        let max = self.cache.iter().copied().fold(0.0, f64::max);
        let n: Vec<f64> = self
            .cache
            .iter()
            .zip(loss.bits())
            .map(|(&v, &l)| if l { v * self.decay } else { v })
            .collect();

        let mut projection = None;
        let c_tilde = if self.projects_at(t) {
            let c = match self.mode {
                ProjectionMode::Exact => {
                    self.ledger.charge_oracle_queries(self.m as u64);
                    exact_projection_constant_entries(&n, self.config.epsilon)?
                }
                ProjectionMode::Approximate => {
                    let target = self.target.as_ref().expect("approximate mode has a target");
                    let est = self.estimator.as_mut().expect("approximate mode has an estimator");
                    let p = project_approx(&|i| n[i], self.m, target, est, self.per_projection_delta)?;
                    projection = Some(p);
                    p.c_tilde
                }
            };
            Some(c)
        } else {
            None
        };
        let next: Vec<f64> = match c_tilde {
            Some(c) => n.iter().map(|&v| (c * v).min(1.0)).collect(),
            None => n.clone(),
        };

        let (delta_psi_update, delta_psi_proj) = if self.trace.is_some() {
            let u = SmoothDistribution::uniform(self.m);
            let before = relative_entropy(&u, &normalize_entries(&self.cache)?)?;
            let mid = relative_entropy(&u, &normalize_entries(&n)?)?;
            let after = if c_tilde.is_some() {
                relative_entropy(&u, &normalize_entries(&next)?)?
            } else {
                mid
            };
            (Some(mid - before), Some(after - mid))
        } else {
            (None, None)
        };

        let density_after = compensated_sum(next.iter().copied()) / self.m as f64;
        if let Some(trace) = self.trace.as_mut() {
            trace.steps.push(TraceStep {
                loss: loss.clone(),
                c_tilde,
            });
            trace.measures.push(next.clone());
        }
        match c_tilde {
            Some(c) => {
                self.implicit.push_update_and_project(loss, c);
                self.projections += 1;
            }
            None => self.implicit.push_update(loss),
        }
        self.cache = next;
        self.t = t;

        Ok(StepReport {
            t,
            weight,
            correct_mass: correct / weight,
            smoothness: self.m as f64 * max / weight,
            projected: c_tilde.is_some(),
            c_tilde,
            projection,
            density_after,
            delta_psi_update,
            delta_psi_proj,
        })
    }
}
