//! Amplitude estimation, simulated by sampling the exact phase-estimation
//! outcome distribution.
//!
//! For `a = sin^2(theta)` the Grover operator has eigenphases `+-theta/pi`.
//! Phase estimation on an `M`-point register returns `y` with probability
//! `sin^2(M pi d) / (M^2 sin^2(pi d))`, `d = theta/pi - y/M`. The `-theta`
//! branch yields `M - y`, and `sin(pi y / M) = sin(pi (M - y) / M)`, so the
//! estimate only needs the `+theta` branch.

use std::f64::consts::PI;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::QueryLedger;

/// Phase-register size for target precision `A`: `4 * A` rounded up to a
/// power of two. A single run lands on one of the two grid points adjacent
/// to `theta/pi` with probability at least `8/pi^2`, and those points are
/// within `pi / M <= 1/A` of `sqrt(a)`.
pub fn grid_size(precision: u64) -> u64 {
    4 * precision.max(1).next_power_of_two()
}

/// Number of median repetitions for failure probability `delta`:
/// `ceil(18 ln(1/delta))`, made odd.
pub fn median_repetitions(delta: f64) -> usize {
    let r = (18.0 * (1.0 / delta).ln()).ceil().max(1.0) as usize;
    if r.is_multiple_of(2) {
        r + 1
    } else {
        r
    }
}

/// Outcome distribution of phase estimation over `grid` register values.
pub fn outcome_distribution(a: f64, grid: u64) -> Vec<f64> {
    let a = a.clamp(0.0, 1.0);
    let omega = a.sqrt().asin() / PI;
    let mf = grid as f64;
    let scaled = omega * mf;
    let nearest = scaled.round();
    let mut probs = vec![0.0; grid as usize];
    if (scaled - nearest).abs() < 1e-9 {
        probs[(nearest as u64 % grid) as usize] = 1.0;
        return probs;
    }
    for (y, p) in probs.iter_mut().enumerate() {
        let d = omega - y as f64 / mf;
        let den = (PI * d).sin();
        *p = if den.abs() < 1e-12 {
            1.0
        } else {
            let num = (mf * PI * d).sin();
            (num * num) / (mf * mf * den * den)
        };
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    probs
}

/// Estimates `sqrt(a)` to additive `1/precision` with probability at least
/// `1 - delta`, returning the median of [`median_repetitions`] simulated
/// phase-estimation runs. Charges `repetitions * grid` Grover applications.
pub fn amplitude_estimate<R: Rng + ?Sized>(
    a: f64,
    precision: u64,
    delta: f64,
    rng: &mut R,
    ledger: &mut QueryLedger,
) -> f64 {
    let grid = grid_size(precision);
    let reps = median_repetitions(delta);
    let probs = outcome_distribution(a, grid);
    let dist = WeightedIndex::new(&probs).expect("outcome distribution is non-degenerate");
    let mut estimates: Vec<f64> = (0..reps)
        .map(|_| {
            let y = dist.sample(rng);
            (PI * y as f64 / grid as f64).sin().abs()
        })
        .collect();
    estimates.sort_by(f64::total_cmp);
    let applications = reps as u64 * grid;
    ledger.charge_grover(applications);
    ledger.charge_modeled_cost(applications as f64);
    estimates[reps / 2]
}
