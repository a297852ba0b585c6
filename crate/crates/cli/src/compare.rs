use std::path::PathBuf;

use boostlab_core::engine::{run_boosting, Algorithm, RunRecord};
use boostlab_core::EstimatorMode;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::config::{mode_name, Input, RunArgs, RunConfig};
use crate::failure::{CmdResult, Failure};
use crate::output::{write_atomic, write_json};
use crate::run::write_record;

#[derive(Args, Debug)]
pub struct CompareCmd {
    #[command(flatten)]
    pub base: RunArgs,
    /// Algorithms to compare (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "kale,quantumboost")]
    pub algos: Vec<Algorithm>,
    /// Estimator modes for quantumboost members (comma separated)
    #[arg(long, value_delimiter = ',', default_value = "simulated-quantum")]
    pub estimators: Vec<EstimatorMode>,
    /// Epsilon values to sweep instead of --epsilon
    #[arg(long, value_delimiter = ',')]
    pub sweep_epsilon: Vec<f64>,
    /// Gamma values to sweep instead of --gamma
    #[arg(long, value_delimiter = ',')]
    pub sweep_gamma: Vec<f64>,
    /// Member config files; replaces the algorithm/estimator product
    #[arg(long = "member", value_name = "FILE")]
    pub members: Vec<PathBuf>,
    /// Directory for compare.csv, slopes.json and per-member logs
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Row {
    member: usize,
    algorithm: String,
    estimator: String,
    gamma: f64,
    epsilon: f64,
    m: usize,
    #[serde(rename = "T")]
    iterations: usize,
    projections: usize,
    final_error: Option<f64>,
    oracle_queries: u64,
    grover_applications: u64,
    modeled_quantum_cost: f64,
    status: String,
}

#[derive(Debug, Serialize)]
struct Slope {
    algorithm: String,
    estimator: String,
    /// `epsilon` or `gamma`; the fit is `ln cost ~ slope * ln x`.
    axis: &'static str,
    slope: f64,
    points: usize,
}

fn members(cmd: &CompareCmd) -> CmdResult<Vec<RunConfig>> {
    if !cmd.members.is_empty() {
        if cmd.members.len() < 2 {
            return Err(Failure::Config("compare needs at least two --member files".into()));
        }
        let configs = cmd
            .members
            .iter()
            .map(|p| {
                RunArgs {
                    config: Some(p.clone()),
                    ..Default::default()
                }
                .resolve()
            })
            .collect::<CmdResult<Vec<_>>>()?;
        let first = &configs[0];
        for (k, c) in configs.iter().enumerate().skip(1) {
            if c.input != first.input || c.learner != first.learner {
                return Err(Failure::Config(format!(
                    "member {} ({}) uses different data or learner than {}",
                    k,
                    cmd.members[k].display(),
                    cmd.members[0].display()
                )));
            }
        }
        return Ok(configs);
    }

    let epsilons: Vec<Option<f64>> = if cmd.sweep_epsilon.is_empty() {
        vec![cmd.base.epsilon]
    } else {
        cmd.sweep_epsilon.iter().copied().map(Some).collect()
    };
    let gammas: Vec<Option<f64>> = if cmd.sweep_gamma.is_empty() {
        vec![cmd.base.gamma]
    } else {
        cmd.sweep_gamma.iter().copied().map(Some).collect()
    };
    let mut out = Vec::new();
    for &algo in &cmd.algos {
        // The baseline projects exactly; its estimator setting is unused.
        let modes: &[EstimatorMode] = match algo {
            Algorithm::Kale => &cmd.estimators[..1.min(cmd.estimators.len())],
            Algorithm::QuantumBoost => &cmd.estimators,
        };
        for &mode in modes {
            for &gamma in &gammas {
                for &epsilon in &epsilons {
                    let mut args = cmd.base.clone();
                    args.algo = Some(algo.to_string());
                    args.estimator = Some(mode_name(mode).to_string());
                    args.gamma = gamma;
                    args.epsilon = epsilon;
                    out.push(args.resolve()?);
                }
            }
        }
    }
    if out.len() < 2 {
        return Err(Failure::Config("compare needs at least two members".into()));
    }
    Ok(out)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn slopes(rows: &[Row]) -> Vec<Slope> {
    let mut out = Vec::new();
    let mut groups: Vec<(&str, &str)> = rows.iter().map(|r| (r.algorithm.as_str(), r.estimator.as_str())).collect();
    groups.dedup();
    groups.sort();
    groups.dedup();
    for (algo, est) in groups {
        for axis in ["epsilon", "gamma"] {
            let pick = |r: &Row| if axis == "epsilon" { r.epsilon } else { r.gamma };
            let other = |r: &Row| if axis == "epsilon" { r.gamma } else { r.epsilon };
            let group: Vec<&Row> = rows
                .iter()
                .filter(|r| r.algorithm == algo && r.estimator == est && r.modeled_quantum_cost > 0.0)
                .collect();
            // Sweep along one axis with the other held fixed.
            let Some(first) = group.first() else { continue };
            let points: Vec<(f64, f64)> = group
                .iter()
                .filter(|r| other(r) == other(first))
                .map(|r| (pick(r).ln(), r.modeled_quantum_cost.ln()))
                .collect();
            let distinct = points.iter().any(|p| p.0 != points[0].0);
            if points.len() >= 2 && distinct {
                out.push(Slope {
                    algorithm: algo.to_string(),
                    estimator: est.to_string(),
                    axis,
                    slope: least_squares_slope(&points),
                    points: points.len(),
                });
            }
        }
    }
    out
}

fn row(k: usize, cfg: &RunConfig, record: &RunRecord, status: String) -> Row {
    let s = &record.summary;
    let total = &s.ledgers.total;
    Row {
        member: k,
        algorithm: cfg.boost.algorithm.to_string(),
        estimator: match cfg.boost.algorithm {
            Algorithm::Kale => "exact-projection".into(),
            Algorithm::QuantumBoost => mode_name(cfg.boost.estimator).into(),
        },
        gamma: cfg.boost.gamma,
        epsilon: cfg.boost.epsilon,
        m: s.m,
        iterations: s.iterations,
        projections: s.projections,
        final_error: s.final_error,
        oracle_queries: total.oracle_queries(),
        grover_applications: total.grover_applications(),
        modeled_quantum_cost: total.modeled_quantum_cost(),
        status,
    }
}

pub fn execute(cmd: &CompareCmd) -> CmdResult {
    let configs = members(cmd)?;
    // Inputs are shared, so the data set is built once.
    let data = configs[0].load_data()?;
    if let Input::Csv(_) = configs[0].input {
        if data.is_empty() {
            return Err(Failure::Config("empty data file".into()));
        }
    }
    let results: Vec<(RunRecord, String)> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| {
                let data = &data;
                scope.spawn(move || {
                    let mut learner = cfg.make_learner(data.len());
                    match run_boosting(data, &mut *learner, &cfg.boost) {
                        Ok(o) => (o.record, "ok".to_string()),
                        Err(a) => (a.record, format!("aborted: {}", a.error)),
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("member thread panicked")).collect()
    });

    let rows: Vec<Row> = configs
        .iter()
        .zip(&results)
        .enumerate()
        .map(|(k, (cfg, (record, status)))| row(k, cfg, record, status.clone()))
        .collect();
    let slopes = slopes(&rows);
    let slopes_json = json!({ "slopes": slopes });

    let write_csv = |w: &mut dyn std::io::Write| -> anyhow::Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        for r in &rows {
            csv.serialize(r)?;
        }
        csv.flush()?;
        Ok(())
    };
    match &cmd.out {
        Some(dir) => {
            write_atomic(&dir.join("compare.csv"), write_csv)?;
            write_json(&dir.join("slopes.json"), &slopes_json)?;
            for (k, (record, _)) in results.iter().enumerate() {
                write_record(&dir.join(format!("member-{k:02}")), record)?;
            }
            println!("{}", serde_json::to_string_pretty(&slopes_json).map_err(anyhow::Error::from)?);
        }
        None => {
            write_csv(&mut std::io::stdout().lock())?;
            eprintln!("{slopes_json}");
        }
    }
    let aborted: Vec<String> = rows
        .iter()
        .filter(|r| r.status != "ok")
        .map(|r| format!("member {} {}", r.member, r.status))
        .collect();
    if !aborted.is_empty() {
        return Err(Failure::Violation(aborted.join("; ")));
    }
    Ok(())
}
