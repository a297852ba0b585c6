use boostlab_core::bregman::{
    capped_density, exact_projection_constant_entries, project_approx, random_high_density_measure,
    verify_approx_definition, DensityTarget,
};
use boostlab_core::engine::{
    check_regret_bound, potential_diagnostics, projection_diagnostics, random_smooth_distribution, run_on_losses,
    BoostConfig, LossVector, POTENTIAL_TOLERANCE,
};
use boostlab_core::measure::{kl_measures, kl_re_identity_residual};
use boostlab_core::rng::{substream, StreamRng};
use boostlab_core::{project_exact, EstimatorMode, Measure, MeanEstimator};
use clap::{Args, ValueEnum};
use rand::seq::index::sample;
use rand::Rng;

use crate::config::mode_name;
use crate::failure::{CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Projections,
    Estimators,
    Bounds,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyCmd {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Randomized trials per check
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Entries per random measure
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[arg(long, env = "BOOSTLAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// Pass count and smallest slack of one check; negative slack fails.
struct Check {
    name: String,
    passed: usize,
    total: usize,
    worst_slack: f64,
    /// Required pass count (all trials unless the check is probabilistic).
    required: usize,
}

impl Check {
    fn new(name: impl Into<String>, total: usize) -> Self {
        Self {
            name: name.into(),
            passed: 0,
            total,
            worst_slack: f64::INFINITY,
            required: total,
        }
    }

    fn record(&mut self, slack: f64) {
        self.worst_slack = self.worst_slack.min(slack);
        if slack >= 0.0 {
            self.passed += 1;
        }
    }

    fn ok(&self) -> bool {
        self.passed >= self.required
    }
}

fn random_measure(rng: &mut StreamRng, m: usize, scale: f64) -> Measure {
    Measure::new((0..m).map(|_| scale * rng.gen::<f64>()).collect()).expect("entries in [0, 1]")
}

/// A measure below density `eps` whose support can still reach the
/// approximate-projection window.
fn low_density_measure(rng: &mut StreamRng, m: usize, epsilon: f64, zeta: f64) -> Measure {
    let min_support = ((epsilon * (1.0 + zeta) * m as f64).ceil() as usize + 1).min(m);
    let s = rng.gen_range(min_support..=m);
    let mut v = vec![0.0; m];
    for i in sample(rng, m, s) {
        v[i] = rng.gen::<f64>().max(1e-6);
    }
    let d: f64 = v.iter().sum::<f64>() / m as f64;
    let target = epsilon * rng.gen_range(0.05..0.9);
    Measure::new(v.iter().map(|x| (x * target / d).min(1.0)).collect()).expect("entries in [0, 1]")
}

fn identities(cmd: &VerifyCmd) -> CmdResult<Vec<Check>> {
    let mut rng = substream(cmd.seed, "verify-identities");
    let mut identity = Check::new("kl-re identity", cmd.trials);
    let mut pythagoras = Check::new("projection pythagorean inequality", cmd.trials);
    for _ in 0..cmd.trials {
        let scale_a = rng.gen_range(0.05..1.0);
        let scale_b = rng.gen_range(0.05..1.0);
        let a = random_measure(&mut rng, cmd.m, scale_a);
        let b = random_measure(&mut rng, cmd.m, scale_b);
        let residual = kl_re_identity_residual(&a, &b)?;
        let tol = 1e-9 * (1.0 + kl_measures(&a, &b)?.abs());
        identity.record(tol - residual.abs());

        let epsilon = rng.gen_range(0.05..0.5);
        let n = low_density_measure(&mut rng, cmd.m, epsilon, 0.0);
        let star = project_exact(&n, epsilon)?;
        let support: Vec<bool> = n.entries().iter().map(|&x| x > 0.0).collect();
        let reachable = support.iter().filter(|&&s| s).count() as f64 / cmd.m as f64;
        let density = rng.gen_range(epsilon..=reachable.max(epsilon));
        let member = random_high_density_measure(&support, density, &mut rng)?;
        let lhs = kl_measures(&member, &n)?;
        let rhs = kl_measures(&member, &star)? + kl_measures(&star, &n)?;
        pythagoras.record(lhs - rhs + 1e-9 * (1.0 + lhs.abs()));
    }
    Ok(vec![identity, pythagoras])
}

fn projections(cmd: &VerifyCmd) -> CmdResult<Vec<Check>> {
    let mut rng = substream(cmd.seed, "verify-projections");
    let delta = 0.01;
    let mut window = Check::new("approximate projection density window", cmd.trials);
    let mut definition = Check::new("approximate projection kl condition", cmd.trials);
    let mut exact = Check::new("exact projection density", cmd.trials);
    for trial in 0..cmd.trials {
        let epsilon = rng.gen_range(0.05..0.4);
        let zeta = rng.gen_range(0.02..0.3);
        let n = low_density_measure(&mut rng, cmd.m, epsilon, zeta);
        let target = DensityTarget::new(epsilon, zeta)?;

        let c_star = exact_projection_constant_entries(n.entries(), epsilon)?;
        exact.record(1e-9 - (capped_density(n.entries(), c_star) - epsilon).abs());

        let entries = n.entries();
        let mut est = MeanEstimator::new(
            EstimatorMode::SimulatedQuantum,
            zeta / 8.0,
            delta,
            epsilon / 2.0,
            substream(cmd.seed, &format!("verify-projections-{trial}")),
        )?;
        let Ok(p) = project_approx(&|i| entries[i], cmd.m, &target, &mut est, delta) else {
            window.record(f64::NEG_INFINITY);
            definition.record(f64::NEG_INFINITY);
            continue;
        };
        let tilde = Measure::new(entries.iter().map(|&x| (p.c_tilde * x).min(1.0)).collect())?;
        let (lo, hi) = target.certified_window();
        let mu = tilde.density();
        window.record((mu - lo).min(hi - mu) / epsilon);
        let star = project_exact(&n, epsilon)?;
        let check = verify_approx_definition(&tilde, &star, &n, epsilon, target.alpha(cmd.m), 40, &mut rng)?;
        let slack = if check.in_high_density_set {
            check.alpha - check.worst_excess
        } else {
            f64::NEG_INFINITY
        };
        definition.record(slack);
    }
    // Each projection fails with probability at most delta.
    let allowed = (cmd.trials as f64 * delta * 3.0).floor() as usize;
    window.required = cmd.trials.saturating_sub(allowed);
    definition.required = window.required;
    Ok(vec![exact, window, definition])
}

fn estimators(cmd: &VerifyCmd) -> CmdResult<Vec<Check>> {
    let (zeta, delta) = (0.1, 0.1);
    let mut checks = Vec::new();
    for mode in [EstimatorMode::ExactPass, EstimatorMode::MonteCarlo, EstimatorMode::SimulatedQuantum] {
        let mut rng = substream(cmd.seed, &format!("verify-estimator-{}", mode_name(mode)));
        let mut check = Check::new(format!("{} mean estimator", mode_name(mode)), cmd.trials);
        for trial in 0..cmd.trials {
            let floor: f64 = rng.gen_range(0.05..0.5);
            let lift = rng.gen_range(floor..1.0);
            let values: Vec<f64> = (0..cmd.m).map(|_| rng.gen_range(0.0..=2.0 * lift).min(1.0)).collect();
            let mu = values.iter().sum::<f64>() / cmd.m as f64;
            if mu < floor {
                check.total -= 1;
                continue;
            }
            let mut est =
                MeanEstimator::new(mode, zeta, delta, floor, substream(cmd.seed, &format!("verify-est-{trial}")))?;
            let mu_hat = est.estimate(&|i| values[i], cmd.m)?;
            check.record((zeta * mu - (mu_hat - mu).abs()) / mu);
        }
        // Success frequency must reach 1 - delta up to three binomial deviations.
        let n = check.total as f64;
        let slack = 3.0 * (n * delta * (1.0 - delta)).sqrt();
        check.required = (n * (1.0 - delta) - slack).max(0.0).ceil() as usize;
        checks.push(check);
    }
    Ok(checks)
}

fn bounds(cmd: &VerifyCmd) -> CmdResult<Vec<Check>> {
    let runs = cmd.trials.clamp(1, 10);
    let mut potential = Check::new("potential per-step bounds", runs * 2);
    let mut regret = Check::new("regret bound", runs * 2);
    let mut projection = Check::new("projection relative-entropy bounds", runs * 2);
    for trial in 0..runs {
        for (tag, cfg) in [
            ("quantumboost", BoostConfig::quantumboost(0.2, 0.1)),
            ("kale", BoostConfig::kale(0.2, 0.1)),
        ] {
            let seed = cmd.seed.wrapping_add(trial as u64);
            let cfg = cfg
                .with_estimator(EstimatorMode::SimulatedQuantum)
                .with_dense_trace(true)
                .with_seed(seed);
            let mut rng = substream(seed, &format!("verify-bounds-{tag}"));
            let (_, booster) = run_on_losses(cmd.m, &cfg, |_, _| {
                let p: f64 = rng.gen_range(0.1..0.9);
                LossVector::new((0..cmd.m).map(|_| rng.gen_bool(p)).collect())
            })
            .map_err(|e| Failure::Violation(format!("{tag} run: {e}")))?;
            let trace = booster.trace().expect("dense trace requested");
            let d = random_smooth_distribution(cmd.m, cfg.epsilon, &mut rng)?;
            let p = potential_diagnostics(trace, &d)?;
            let slack = p.worst_update_slack.min(p.worst_proj_slack) + POTENTIAL_TOLERANCE;
            potential.record(if p.check().is_ok() { slack.max(0.0) } else { slack.min(-f64::MIN_POSITIVE) });
            regret.record(check_regret_bound(trace, &d)?.slack);
            let pr = projection_diagnostics(trace, &[d])?;
            let slack = if pr.steps.is_empty() { 0.0 } else { pr.worst_slack() };
            projection.record(if pr.check().is_ok() { slack.max(0.0) } else { slack.min(-f64::MIN_POSITIVE) });
        }
    }
    Ok(vec![potential, regret, projection])
}

pub fn execute(cmd: &VerifyCmd) -> CmdResult {
    if cmd.trials == 0 || cmd.m < 10 {
        return Err(Failure::Config("need --trials >= 1 and --m >= 10".into()));
    }
    let mut checks = Vec::new();
    let all = cmd.suite == Suite::All;
    if all || cmd.suite == Suite::Identities {
        checks.extend(identities(cmd)?);
    }
    if all || cmd.suite == Suite::Projections {
        checks.extend(projections(cmd)?);
    }
    if all || cmd.suite == Suite::Estimators {
        checks.extend(estimators(cmd)?);
    }
    if all || cmd.suite == Suite::Bounds {
        checks.extend(bounds(cmd)?);
    }
    let mut failed = 0;
    for c in &checks {
        let verdict = if c.ok() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {}: {}/{} passed (need {}), worst slack {:.3e}",
            c.name, c.passed, c.total, c.required, c.worst_slack
        );
        if !c.ok() {
            failed += 1;
        }
    }
    println!("verify: {}/{} checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        return Err(Failure::Violation(format!("{failed} verification checks failed")));
    }
    Ok(())
}
