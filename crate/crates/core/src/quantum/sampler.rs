use rand::Rng;

use super::QueryLedger;
use crate::error::{Error, Result};

/// Modeled quantum cost of preparing one sample when `|M| >= weight_floor`:
/// `ceil(1 / sqrt(weight_floor / m))`.
pub fn sample_cost(weight_floor: f64, m: usize) -> f64 {
    (1.0 / (weight_floor / m as f64).sqrt()).ceil()
}

/// Draws index `i` with probability `M(i) / |M|` by rejection sampling:
/// propose `i` uniformly, accept with probability `M(i)`.
///
/// Every proposal is charged to `samples_drawn`; the delivered sample is
/// charged [`sample_cost`] of modeled quantum cost. Fails with
/// [`Error::FloorViolation`] after `2m / eps'` consecutive rejections,
/// `eps' = weight_floor / m`.
pub fn prepare_smooth_sample<R: Rng + ?Sized>(
    entry: &dyn Fn(usize) -> f64,
    m: usize,
    weight_floor: f64,
    rng: &mut R,
    ledger: &mut QueryLedger,
) -> Result<usize> {
    if m == 0 || !(weight_floor > 0.0) {
        return Err(Error::Config("sampling needs m >= 1 and a positive weight floor".into()));
    }
    let eps_prime = weight_floor / m as f64;
    let limit = (2.0 * m as f64 / eps_prime).ceil() as u64;
    for attempt in 1..=limit {
        let i = rng.gen_range(0..m);
        if rng.gen::<f64>() < entry(i) {
            ledger.charge_samples(attempt);
            ledger.charge_modeled_cost(sample_cost(weight_floor, m));
            return Ok(i);
        }
    }
    ledger.charge_samples(limit);
    Err(Error::FloorViolation {
        reason: format!("{limit} consecutive rejections with weight floor {weight_floor}"),
    })
}
