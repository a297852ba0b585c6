//! Potential-function diagnostics over a dense trace.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DenseTrace;
use crate::bregman::{exact_projection_constant_entries, random_high_density_measure, scale_capped};
use crate::error::{Error, Result};
use crate::measure::{normalize, normalize_entries, relative_entropy, SmoothDistribution};

/// Slack allowed on the per-iteration potential bounds.
pub const POTENTIAL_TOLERANCE: f64 = 1e-8;
/// Slack allowed on the regret bound.
pub const REGRET_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialRow {
    pub t: usize,
    pub projected: bool,
    pub delta_update: f64,
    /// `gamma ((1 + gamma) <D, l^t> - <D^t, l^t>)`.
    pub update_bound: f64,
    pub delta_proj: f64,
    /// `zeta` at projection steps, zero elsewhere.
    pub proj_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    /// `Psi^1(D) = RE(D || D^1)`.
    pub initial_potential: f64,
    pub rows: Vec<PotentialRow>,
    /// Smallest `bound - delta` seen; negative beyond tolerance is a violation.
    pub worst_update_slack: f64,
    pub worst_proj_slack: f64,
    #[serde(skip)]
    pub violation: Option<Error>,
}

impl PotentialReport {
    pub fn check(&self) -> Result<()> {
        match &self.violation {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }
}

fn require_reference(trace: &DenseTrace, d_ref: &SmoothDistribution) -> Result<()> {
    if d_ref.len() != trace.m() {
        return Err(Error::LengthMismatch {
            left: d_ref.len(),
            right: trace.m(),
        });
    }
    if !d_ref.is_smooth(trace.epsilon) {
        return Err(Error::Config(format!(
            "reference distribution is not {}-smooth (max probability {})",
            trace.epsilon,
            d_ref.max_prob()
        )));
    }
    Ok(())
}

/// Decomposes `Psi^{t+1}(D) - Psi^t(D)` into update and projection parts
/// and checks each against its bound.
pub fn potential_diagnostics(trace: &DenseTrace, d_ref: &SmoothDistribution) -> Result<PotentialReport> {
    require_reference(trace, d_ref)?;
    let gamma = trace.gamma;
    let mut rows = Vec::with_capacity(trace.iterations());
    let mut worst_update_slack = f64::INFINITY;
    let mut worst_proj_slack = f64::INFINITY;
    let mut violation = None;
    let initial_potential = relative_entropy(d_ref, &normalize_entries(trace.measure(1))?)?;

    let mut psi = initial_potential;
    for t in 1..=trace.iterations() {
        let step = &trace.steps[t - 1];
        let d_t = normalize_entries(trace.measure(t))?;
        let n = trace.pre_projection(t);
        let psi_mid = relative_entropy(d_ref, &normalize_entries(&n)?)?;
        let psi_next = relative_entropy(d_ref, &normalize_entries(trace.measure(t + 1))?)?;
        let bits = step.loss.bits();
        let delta_update = psi_mid - psi;
        let update_bound = gamma * ((1.0 + gamma) * d_ref.mass_on(bits) - d_t.mass_on(bits));
        let delta_proj = psi_next - psi_mid;
        let projected = step.c_tilde.is_some();
        let proj_bound = if projected { trace.zeta_effective } else { 0.0 };

        let us = update_bound - delta_update;
        let ps = proj_bound - delta_proj;
        worst_update_slack = worst_update_slack.min(us);
        worst_proj_slack = worst_proj_slack.min(ps);
        if violation.is_none() {
            if us < -POTENTIAL_TOLERANCE {
                violation = Some(Error::BoundViolation {
                    iteration: t,
                    what: "update potential bound".into(),
                    slack: us,
                });
            } else if ps < -POTENTIAL_TOLERANCE {
                violation = Some(Error::BoundViolation {
                    iteration: t,
                    what: "projection potential bound".into(),
                    slack: ps,
                });
            } else if !projected && delta_proj != 0.0 {
                violation = Some(Error::BoundViolation {
                    iteration: t,
                    what: "nonzero projection potential change without a projection".into(),
                    slack: -delta_proj.abs(),
                });
            }
        }
        rows.push(PotentialRow {
            t,
            projected,
            delta_update,
            update_bound,
            delta_proj,
            proj_bound,
        });
        psi = psi_next;
    }
    Ok(PotentialReport {
        initial_potential,
        rows,
        worst_update_slack,
        worst_proj_slack,
        violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    /// `sum_t <D^t, l^t>`.
    pub learner_loss: f64,
    /// `(1+gamma) sum_t <D, l^t> + R zeta/gamma + RE(D||D^1)/gamma`.
    pub bound: f64,
    pub slack: f64,
    pub projections: usize,
}

impl RegretReport {
    pub fn holds(&self) -> bool {
        self.slack >= -REGRET_TOLERANCE
    }

    pub fn check(&self) -> Result<()> {
        if self.holds() {
            Ok(())
        } else {
            Err(Error::BoundViolation {
                iteration: 0,
                what: "regret bound".into(),
                slack: self.slack,
            })
        }
    }
}

pub fn check_regret_bound(trace: &DenseTrace, d_ref: &SmoothDistribution) -> Result<RegretReport> {
    require_reference(trace, d_ref)?;
    let gamma = trace.gamma;
    let mut learner_loss = 0.0;
    let mut reference_loss = 0.0;
    for t in 1..=trace.iterations() {
        let bits = trace.steps[t - 1].loss.bits();
        learner_loss += normalize_entries(trace.measure(t))?.mass_on(bits);
        reference_loss += d_ref.mass_on(bits);
    }
    let projections = trace.projections();
    let re1 = relative_entropy(d_ref, &normalize_entries(trace.measure(1))?)?;
    let bound = (1.0 + gamma) * reference_loss + projections as f64 * trace.zeta_effective / gamma + re1 / gamma;
    Ok(RegretReport {
        learner_loss,
        bound,
        slack: bound - learner_loss,
        projections,
    })
}

/// Per-projection comparison of the realized distribution `D^{t+1}` with
/// the unprojected `D_hat^{t+1}` and the exact projection `D*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionStepReport {
    pub t: usize,
    /// Smallest `RE(D_E||D_hat) + zeta - RE(D_E||D^{t+1})` over references.
    pub worst_slack_vs_unprojected: f64,
    /// Smallest `RE(D_E||D*) + zeta - RE(D_E||D^{t+1})` over references.
    pub worst_slack_vs_exact: f64,
    /// `max_i ln(D*(i) / D^{t+1}(i))`.
    pub max_log_ratio: f64,
    pub references: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub steps: Vec<ProjectionStepReport>,
    #[serde(skip)]
    pub violation: Option<Error>,
}

impl ProjectionReport {
    pub fn check(&self) -> Result<()> {
        match &self.violation {
            Some(e) => Err(e.clone()),
            None => Ok(()),
        }
    }

    pub fn worst_slack(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.worst_slack_vs_unprojected.min(s.worst_slack_vs_exact))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Indices of the `k` largest `num[i] / den[i]`.
fn top_ratio(num: &[f64], den: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..num.len()).collect();
    idx.sort_by(|&a, &b| (num[b] / den[b]).total_cmp(&(num[a] / den[a])));
    idx.truncate(k);
    idx
}

/// At every projection step, checks `RE(D_E||D^{t+1}) <= RE(D_E||D_hat) + zeta`
/// and `RE(D_E||D^{t+1}) <= RE(D_E||D*) + zeta` for uniform distributions
/// `D_E` on `ceil(eps m)` points: the given `references` plus, per step, the
/// sets maximizing `D*/D^{t+1}` and `D_hat/D^{t+1}`.
pub fn projection_diagnostics(trace: &DenseTrace, references: &[SmoothDistribution]) -> Result<ProjectionReport> {
    for r in references {
        require_reference(trace, r)?;
    }
    let m = trace.m();
    let k = ((trace.epsilon * m as f64) - 1e-9).ceil().max(1.0) as usize;
    let zeta = trace.zeta_effective;
    let mut steps = Vec::new();
    let mut violation = None;
    for t in 1..=trace.iterations() {
        if trace.steps[t - 1].c_tilde.is_none() {
            continue;
        }
        let n = trace.pre_projection(t);
        let d_hat = normalize_entries(&n)?;
        let d_next = normalize_entries(trace.measure(t + 1))?;
        let c_star = exact_projection_constant_entries(&n, trace.epsilon)?;
        let d_star = normalize_entries(&scale_capped(&n, c_star))?;

        let mut refs: Vec<SmoothDistribution> = references.to_vec();
        refs.push(SmoothDistribution::uniform_over(m, &top_ratio(d_star.probs(), d_next.probs(), k))?);
        refs.push(SmoothDistribution::uniform_over(m, &top_ratio(d_hat.probs(), d_next.probs(), k))?);

        let mut worst_hat = f64::INFINITY;
        let mut worst_star = f64::INFINITY;
        for d in &refs {
            let re_next = relative_entropy(d, &d_next)?;
            worst_hat = worst_hat.min(relative_entropy(d, &d_hat)? + zeta - re_next);
            worst_star = worst_star.min(relative_entropy(d, &d_star)? + zeta - re_next);
        }
        let max_log_ratio = d_star
            .probs()
            .iter()
            .zip(d_next.probs())
            .filter(|(s, _)| **s > 0.0)
            .map(|(s, n)| (s / n).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        if violation.is_none() && worst_hat.min(worst_star) < -POTENTIAL_TOLERANCE {
            violation = Some(Error::BoundViolation {
                iteration: t,
                what: "projected relative entropy exceeds reference by more than zeta".into(),
                slack: worst_hat.min(worst_star),
            });
        }
        steps.push(ProjectionStepReport {
            t,
            worst_slack_vs_unprojected: worst_hat,
            worst_slack_vs_exact: worst_star,
            max_log_ratio,
            references: refs.len(),
        });
    }
    Ok(ProjectionReport { steps, violation })
}

/// A random member of the `eps`-smooth distributions on `m` points: either
/// uniform on a random set of at least `eps m` points or a normalized random
/// measure of density in `[eps, 1]`.
pub fn random_smooth_distribution<R: Rng + ?Sized>(m: usize, epsilon: f64, rng: &mut R) -> Result<SmoothDistribution> {
    let k_min = ((epsilon * m as f64) - 1e-9).ceil().max(1.0) as usize;
    if rng.gen_bool(0.5) {
        let k = rng.gen_range(k_min..=m);
        let idx = sample(rng, m, k).into_vec();
        SmoothDistribution::uniform_over(m, &idx)
    } else {
        let density = rng.gen_range(epsilon..=1.0);
        let measure = random_high_density_measure(&vec![true; m], density, rng)?;
        normalize(&measure)
    }
}

/// Uniform distribution on the examples the combined hypothesis gets wrong.
pub fn misclassified_reference(m: usize, wrong: &[usize]) -> Result<SmoothDistribution> {
    SmoothDistribution::uniform_over(m, wrong)
}
