//! Bregman (KL) projections onto the high-density set
//! `Gamma_eps = { M : mu(M) >= eps }`.
//!
//! The projection of `N` has the form `min(1, c N)` for the smallest `c >= 1`
//! reaching density `eps`. [`exact_projection_constant`] solves for `c` on
//! the piecewise-linear density curve; [`project_approx`] finds a constant
//! whose measure has density in `[eps, (1 + zeta) eps]` using only a mean
//! estimator over entry queries.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{compensated_sum, kl_entries, Measure};
use crate::quantum::MeanEstimator;

/// Largest doubling exponent tried when bracketing the projection constant.
pub const MAX_DOUBLINGS: u32 = 60;

/// Target set and precision of an approximate projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityTarget {
    epsilon: f64,
    zeta: f64,
}

impl DensityTarget {
    pub fn new(epsilon: f64, zeta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0, 1), got {epsilon}")));
        }
        if !(zeta > 0.0 && zeta < 0.5) {
            return Err(Error::Config(format!("zeta must lie in (0, 0.5), got {zeta}")));
        }
        Ok(Self { epsilon, zeta })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// `alpha = zeta * eps * m`, the KL slack of the approximation.
    pub fn alpha(&self, m: usize) -> f64 {
        self.zeta * self.epsilon * m as f64
    }

    /// Estimate acceptance window `[eps(1 + zeta/4), eps(1 + 3 zeta/4)]`.
    pub fn acceptance_window(&self) -> (f64, f64) {
        (
            self.epsilon * (1.0 + self.zeta / 4.0),
            self.epsilon * (1.0 + 0.75 * self.zeta),
        )
    }

    /// Certified window `[eps, (1 + zeta) eps]` for the true density.
    pub fn certified_window(&self) -> (f64, f64) {
        (self.epsilon, self.epsilon * (1.0 + self.zeta))
    }
}

/// `min(1, c x)` entrywise.
pub fn scale_capped(entries: &[f64], c: f64) -> Vec<f64> {
    entries.iter().map(|&x| (c * x).min(1.0)).collect()
}

/// Density of `min(1, c N)`.
pub fn capped_density(entries: &[f64], c: f64) -> f64 {
    compensated_sum(entries.iter().map(|&x| (c * x).min(1.0))) / entries.len() as f64
}

/// Smallest `c >= 1` with `mu(min(1, c N)) = eps` (or `1` if `N` is already
/// in `Gamma_eps`).
///
/// Sorting the support in decreasing order, the first `k` entries are capped
/// at the solution and `c = (eps m - k) / sum_{j >= k} v_j`; the solve picks
/// the unique `k` consistent with the caps.
pub fn exact_projection_constant(n: &Measure, epsilon: f64) -> Result<f64> {
    exact_projection_constant_entries(n.entries(), epsilon)
}

pub fn exact_projection_constant_entries(n: &[f64], epsilon: f64) -> Result<f64> {
    if n.is_empty() {
        return Err(Error::ZeroWeight);
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let m = n.len() as f64;
    let target = epsilon * m;
    if compensated_sum(n.iter().copied()) >= target {
        return Ok(1.0);
    }
    let mut support: Vec<f64> = n.iter().copied().filter(|&x| x > 0.0).collect();
    let s = support.len();
    if (s as f64) < target * (1.0 - 1e-12) {
        return Err(Error::Infeasible {
            reason: format!("support {s} is smaller than eps * m = {target}"),
        });
    }
    support.sort_by(|a, b| b.total_cmp(a));

    // suffix[k] = sum_{j >= k} support[j]
    let mut suffix = vec![0.0; s + 1];
    let (mut acc, mut comp) = (0.0_f64, 0.0_f64);
    for k in (0..s).rev() {
        let v = support[k];
        let t = acc + v;
        if acc.abs() >= v.abs() {
            comp += (acc - t) + v;
        } else {
            comp += (v - t) + acc;
        }
        acc = t;
        suffix[k] = acc + comp;
    }

    const TOL: f64 = 1e-12;
    for k in 0..s {
        let remaining = target - k as f64;
        if remaining <= 0.0 {
            break;
        }
        let c = remaining / suffix[k];
        let uncapped_ok = c * support[k] <= 1.0 + TOL;
        let capped_ok = k == 0 || c * support[k - 1] >= 1.0 - TOL;
        if uncapped_ok && capped_ok {
            return Ok(c.max(1.0));
        }
    }
    // Density eps is only reached with the whole support capped.
    Ok((1.0 / support[s - 1]).max(1.0))
}

/// `P_eps(N) = min(1, c N)` with the exact constant.
pub fn project_exact(n: &Measure, epsilon: f64) -> Result<Measure> {
    let c = exact_projection_constant(n, epsilon)?;
    Measure::new(scale_capped(n.entries(), c))
}

/// Outcome of an approximate projection: the implicit constant plus
/// accounting. Serializes as
/// `{c_tilde, density_estimate, steps, estimator_queries}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImplicitProjection {
    pub c_tilde: f64,
    pub density_estimate: f64,
    /// Estimator calls made (the `c = 1` probe, doublings and bisection).
    pub steps: usize,
    /// Oracle queries plus Grover applications charged during the search.
    pub estimator_queries: u64,
}

/// Number of bisection steps for an upper bracket `c_hi`:
/// `ceil(log2(c_hi * 8 / (eps zeta)))`.
pub fn bisection_steps(c_hi: f64, target: &DensityTarget) -> usize {
    (c_hi * 8.0 / (target.epsilon * target.zeta)).log2().ceil().max(1.0) as usize
}

/// Finds `c_tilde` whose estimated capped density falls in the acceptance
/// window; with estimator error at most `zeta/8` the true density of
/// `min(1, c_tilde N)` is then in `[eps, (1 + zeta) eps]`.
///
/// The failure budget is split as `delta/2` over the bracketing calls
/// (call `k` gets `delta / (2 (k+1)(k+2))`) and `delta/2` evenly over the
/// bisection steps.
pub fn project_approx(
    n: &dyn Fn(usize) -> f64,
    m: usize,
    target: &DensityTarget,
    estimator: &mut MeanEstimator,
    delta: f64,
) -> Result<ImplicitProjection> {
    if m == 0 {
        return Err(Error::ZeroWeight);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    let (lower, upper) = target.acceptance_window();
    let est_zeta = target.zeta / 8.0;
    let before = *estimator.ledger();
    let mut steps = 0usize;

    let mut probe = |c: f64, call_delta: f64, steps: &mut usize| -> Result<f64> {
        *steps += 1;
        estimator.estimate_with(&|i| (c * n(i)).min(1.0), m, est_zeta, call_delta)
    };
    let bracket_delta = |k: u32| delta / (2.0 * (k as f64 + 1.0) * (k as f64 + 2.0));

    let done = |c: f64, mu: f64, steps: usize, estimator: &MeanEstimator| {
        let spent = estimator.ledger().since(&before);
        ImplicitProjection {
            c_tilde: c,
            density_estimate: mu,
            steps,
            estimator_queries: spent.oracle_queries() + spent.grover_applications(),
        }
    };

    let mu = probe(1.0, bracket_delta(0), &mut steps)?;
    if mu >= lower {
        return Ok(done(1.0, mu, steps, estimator));
    }

    let mut lo = 1.0;
    let mut hi = None;
    let mut c = 2.0;
    for k in 1..=MAX_DOUBLINGS {
        let mu = probe(c, bracket_delta(k), &mut steps)?;
        if (lower..=upper).contains(&mu) {
            return Ok(done(c, mu, steps, estimator));
        }
        if mu > upper {
            hi = Some(c);
            break;
        }
        lo = c;
        c *= 2.0;
    }
    let Some(mut hi) = hi else {
        return Err(Error::Infeasible {
            reason: format!("density stays below {lower} up to c = 2^{MAX_DOUBLINGS}"),
        });
    };

    let bisect = bisection_steps(hi, target);
    let step_delta = delta / (2.0 * bisect as f64);
    for _ in 0..bisect {
        let mid = 0.5 * (lo + hi);
        let mu = probe(mid, step_delta, &mut steps)?;
        if (lower..=upper).contains(&mu) {
            return Ok(done(mid, mu, steps, estimator));
        }
        if mu < lower {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::EstimatorFailure { step: steps })
}

/// A random member of `Gamma_eps` supported on `support`, with density
/// exactly `target_density` (which must be reachable on the support).
pub fn random_high_density_measure<R: Rng + ?Sized>(
    support: &[bool],
    target_density: f64,
    rng: &mut R,
) -> Result<Measure> {
    let shape: f64 = rng.gen_range(0.2..3.0);
    let base: Vec<f64> = support
        .iter()
        .map(|&s| if s { rng.gen::<f64>().powf(shape).max(1e-9) } else { 0.0 })
        .collect();
    let d = compensated_sum(base.iter().copied()) / base.len() as f64;
    if d >= target_density {
        let scale = target_density / d;
        return Measure::new(base.iter().map(|x| x * scale).collect());
    }
    let c = exact_projection_constant_entries(&base, target_density)?;
    Measure::new(scale_capped(&base, c))
}

/// Result of checking the approximate-projection definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxCheck {
    /// `mu(M_tilde) >= eps`.
    pub in_high_density_set: bool,
    pub density: f64,
    /// Largest observed `KL(M||M_tilde) - KL(M||M*)` over sampled `M`.
    pub worst_excess: f64,
    pub alpha: f64,
    pub members_checked: usize,
}

impl ApproxCheck {
    pub fn holds(&self) -> bool {
        self.in_high_density_set && self.worst_excess <= self.alpha
    }
}

/// Checks that `M_tilde` is an `alpha`-approximation of the projection
/// `M*` of `N`: membership in `Gamma_eps` exactly, and the KL condition on
/// `samples` random members of `Gamma_eps` plus extreme points (the uniform
/// `eps` measure, random indicator measures, and the indicator on the
/// indices maximizing `M*/M_tilde`).
#[allow(clippy::too_many_arguments)]
pub fn verify_approx_definition<R: Rng + ?Sized>(
    m_tilde: &Measure,
    m_star: &Measure,
    n: &Measure,
    epsilon: f64,
    alpha: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ApproxCheck> {
    let m = n.len();
    if m_tilde.len() != m || m_star.len() != m {
        return Err(Error::LengthMismatch {
            left: m_tilde.len(),
            right: m,
        });
    }
    let support: Vec<bool> = n.entries().iter().map(|&x| x > 0.0).collect();
    let support_idx: Vec<usize> = (0..m).filter(|&i| support[i]).collect();
    let s = support_idx.len();
    let k = ((epsilon * m as f64).ceil() as usize).clamp(1, s.max(1));

    let mut members: Vec<Vec<f64>> = Vec::new();
    let level = epsilon * m as f64 / s as f64;
    members.push(support.iter().map(|&b| if b { level.min(1.0) } else { 0.0 }).collect());

    let mut ratio_order = support_idx.clone();
    let ratio = |i: usize| m_star.entries()[i] / m_tilde.entries()[i].max(f64::MIN_POSITIVE);
    ratio_order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)));
    let mut worst_vertex = vec![0.0; m];
    ratio_order.iter().take(k).for_each(|&i| worst_vertex[i] = 1.0);
    members.push(worst_vertex);

    for _ in 0..(samples / 4).max(1) {
        let mut v = vec![0.0; m];
        for j in sample_indices(rng, s, k.min(s)) {
            v[support_idx[j]] = 1.0;
        }
        members.push(v);
    }
    let max_density = s as f64 / m as f64;
    for _ in 0..samples {
        let d = if max_density > epsilon {
            rng.gen_range(epsilon..=max_density)
        } else {
            epsilon
        };
        members.push(random_high_density_measure(&support, d, rng)?.into_entries());
    }

    let mut worst = f64::NEG_INFINITY;
    for member in &members {
        let excess = match (kl_entries(member, m_tilde.entries()), kl_entries(member, m_star.entries())) {
            (Ok(a), Ok(b)) => a - b,
            _ => f64::INFINITY,
        };
        worst = worst.max(excess);
    }
    Ok(ApproxCheck {
        in_high_density_set: m_tilde.density() >= epsilon,
        density: m_tilde.density(),
        worst_excess: worst,
        alpha,
        members_checked: members.len(),
    })
}
