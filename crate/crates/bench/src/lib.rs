//! Benchmark fixtures.

use boostlab_core::engine::{Booster, BoostConfig, LossVector};
use boostlab_core::rng::substream;
use boostlab_core::Measure;
use rand::Rng;

/// A measure of density about `epsilon / 2` on `m` points.
pub fn low_density_measure(m: usize, epsilon: f64, seed: u64) -> Measure {
    let mut rng = substream(seed, "bench-measure");
    Measure::new((0..m).map(|_| epsilon * rng.gen::<f64>()).collect()).expect("entries in [0, 1]")
}

/// `t` loss vectors with a random per-step loss rate.
pub fn random_losses(m: usize, t: usize, seed: u64) -> Vec<LossVector> {
    let mut rng = substream(seed, "bench-losses");
    (0..t)
        .map(|_| {
            let p: f64 = rng.gen_range(0.1..0.9);
            LossVector::new((0..m).map(|_| rng.gen_bool(p)).collect())
        })
        .collect()
}

/// A booster advanced through `losses`.
pub fn warmed_booster(m: usize, config: &BoostConfig, losses: &[LossVector]) -> Booster {
    let mut booster = Booster::new(m, config).expect("valid config");
    for l in losses {
        booster.step(l.clone()).expect("step succeeds");
    }
    booster
}
