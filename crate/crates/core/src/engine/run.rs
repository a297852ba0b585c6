use std::fmt;

use super::booster::{Booster, StepReport};
use super::config::{Algorithm, BoostConfig, ContractPolicy};
use super::record::{IterationRow, Ledgers, RunRecord, RunSummary};
use super::{majority_from_sum, DenseTrace, ImplicitMeasure, LossVector, MajorityVote};
use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::learners::{LearnerInput, WeakLearner};
use crate::quantum::{prepare_smooth_sample, QueryLedger};
use crate::rng::substream;

/// A completed run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub hypothesis: MajorityVote,
    pub record: RunRecord,
    pub implicit: ImplicitMeasure,
    pub trace: Option<DenseTrace>,
}

/// A run stopped by an error, with everything recorded up to that point.
#[derive(Debug, Clone)]
pub struct RunAborted {
    pub error: Error,
    pub record: RunRecord,
}

impl fmt::Display for RunAborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted after {} iterations: {}", self.record.rows.len(), self.error)
    }
}

impl std::error::Error for RunAborted {}

struct Recorder {
    rows: Vec<IterationRow>,
    sampling: QueryLedger,
    contract_violations: usize,
    min_weight: f64,
}

impl Recorder {
    fn new() -> Self {
        Self {
            rows: Vec::new(),
            sampling: QueryLedger::new(),
            contract_violations: 0,
            min_weight: f64::INFINITY,
        }
    }

    fn push(&mut self, report: &StepReport, booster: &Booster, error: Option<f64>, contract_ok: bool) {
        let mut ledger = self.sampling;
        ledger += &booster.projection_ledger();
        self.min_weight = self.min_weight.min(report.weight).min(report.density_after * booster.m() as f64);
        if !contract_ok {
            self.contract_violations += 1;
        }
        self.rows.push(IterationRow {
            t: report.t,
            weight: report.weight,
            empirical_error: error,
            correct_mass: report.correct_mass,
            advantage: report.correct_mass - 0.5,
            smoothness: report.smoothness,
            projected: report.projected,
            c_tilde: report.c_tilde,
            density_after: report.density_after,
            delta_psi_update: report.delta_psi_update,
            delta_psi_proj: report.delta_psi_proj,
            contract_ok,
            ledger,
        });
    }

    fn finish(&self, booster: &Booster) -> RunRecord {
        let config = booster.config();
        let projection = booster.projection_ledger();
        let mut total = self.sampling;
        total += &projection;
        let min_weight = if self.rows.is_empty() {
            booster.weight()
        } else {
            self.min_weight
        };
        RunRecord {
            rows: self.rows.clone(),
            summary: RunSummary {
                algorithm: config.algorithm,
                m: booster.m(),
                gamma: config.gamma,
                epsilon: config.epsilon,
                zeta: config.zeta_effective(),
                interval: config.interval(),
                iterations: self.rows.len(),
                projections: booster.projections(),
                final_error: self.rows.last().and_then(|r| r.empirical_error),
                max_smoothness: self.rows.iter().map(|r| r.smoothness).fold(0.0, f64::max),
                min_weight,
                contract_violations: self.contract_violations,
                ledgers: Ledgers {
                    sampling: self.sampling,
                    projection,
                    total,
                },
            },
        }
    }
}

fn contract_holds(report: &StepReport, gamma: f64) -> bool {
    report.correct_mass >= 0.5 + gamma - 1e-9
}

/// Runs the configured boosting algorithm on `data`.
///
/// Each iteration prepares `W` samples from `D^t` by rejection sampling,
/// hands them to the learner with `D^t`, and updates the measure with the
/// returned hypothesis' loss vector.
pub fn run_boosting(
    data: &TrainingSet,
    learner: &mut dyn WeakLearner,
    config: &BoostConfig,
) -> std::result::Result<RunOutput, Box<RunAborted>> {
    let m = data.len();
    let mut booster = match Booster::new(m, config) {
        Ok(b) => b,
        Err(error) => {
            return Err(Box::new(RunAborted {
                error,
                record: empty_record(m, config),
            }))
        }
    };
    let mut recorder = Recorder::new();
    let mut rng = substream(config.seed, "sampler");
    let floor = config.sampling_floor(m);
    let w = learner.samples_per_call().max(1);
    let mut votes = vec![0i64; m];
    let mut hypothesis = MajorityVote::new();

    for _ in 0..booster.total_iterations() {
        let iteration: Result<()> = (|| {
            let cache = booster.measure();
            let samples = (0..w)
                .map(|_| prepare_smooth_sample(&|i| cache[i], m, floor, &mut rng, &mut recorder.sampling))
                .collect::<Result<Vec<_>>>()?;
            let distribution = booster.distribution();
            let h = learner.learn(&LearnerInput {
                data,
                distribution: &distribution,
                samples: &samples,
            });
            let loss = LossVector::of(&h, data);
            let mut wrong = 0usize;
            for (i, v) in votes.iter_mut().enumerate() {
                *v += h.predict(data, i) as i64;
                if majority_from_sum(*v) != data.label(i) {
                    wrong += 1;
                }
            }
            hypothesis.push(h);
            let report = booster.step(loss)?;
            let ok = contract_holds(&report, config.gamma);
            recorder.push(&report, &booster, Some(wrong as f64 / m as f64), ok);
            if !ok && config.contract == ContractPolicy::Abort {
                return Err(Error::WeakLearnerContractViolation {
                    iteration: report.t,
                    advantage: report.correct_mass,
                    required: 0.5 + config.gamma,
                });
            }
            Ok(())
        })();
        if let Err(error) = iteration {
            return Err(Box::new(RunAborted {
                error,
                record: recorder.finish(&booster),
            }));
        }
    }

    let record = recorder.finish(&booster);
    let (implicit, trace) = booster.into_parts();
    Ok(RunOutput {
        hypothesis,
        record,
        implicit,
        trace,
    })
}

/// Baseline booster: dense measure, exact projection every iteration.
pub fn run_kale_smoothboost(
    data: &TrainingSet,
    learner: &mut dyn WeakLearner,
    config: &BoostConfig,
) -> std::result::Result<RunOutput, Box<RunAborted>> {
    let config = BoostConfig {
        algorithm: Algorithm::Kale,
        ..config.clone()
    };
    run_boosting(data, learner, &config)
}

/// Lazy booster: implicit measure, approximate projection every `K` steps.
pub fn run_quantumboost(
    data: &TrainingSet,
    learner: &mut dyn WeakLearner,
    config: &BoostConfig,
) -> std::result::Result<RunOutput, Box<RunAborted>> {
    let config = BoostConfig {
        algorithm: Algorithm::QuantumBoost,
        ..config.clone()
    };
    run_boosting(data, learner, &config)
}

/// Drives the update machinery with arbitrary loss vectors and no learner.
/// `next_loss(t, D^t)` may adapt to the current distribution.
pub fn run_on_losses<F>(m: usize, config: &BoostConfig, mut next_loss: F) -> Result<(RunRecord, Booster)>
where
    F: FnMut(usize, &[f64]) -> LossVector,
{
    let mut booster = Booster::new(m, config)?;
    let mut recorder = Recorder::new();
    for t in 1..=booster.total_iterations() {
        let loss = next_loss(t, &booster.distribution());
        let report = booster.step(loss)?;
        recorder.push(&report, &booster, None, true);
    }
    let record = recorder.finish(&booster);
    Ok((record, booster))
}

fn empty_record(m: usize, config: &BoostConfig) -> RunRecord {
    RunRecord {
        rows: Vec::new(),
        summary: RunSummary {
            algorithm: config.algorithm,
            m,
            gamma: config.gamma,
            epsilon: config.epsilon,
            zeta: config.zeta_effective(),
            interval: config.interval(),
            iterations: 0,
            projections: 0,
            final_error: None,
            max_smoothness: 0.0,
            min_weight: 0.0,
            contract_violations: 0,
            ledgers: Ledgers {
                sampling: QueryLedger::new(),
                projection: QueryLedger::new(),
                total: QueryLedger::new(),
            },
        },
    }
}
