use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use boostlab_core::engine::{Algorithm, BoostConfig, ContractPolicy, ProjectionMode};
use boostlab_core::learners::{PlantedLearner, PlantedLearnerConfig, StumpLearner, WeakLearner};
use boostlab_core::rng::substream;
use boostlab_core::{parse_kv_lines, EstimatorMode, TaskSpec, TrainingSet};
use clap::Args;
use serde::Serialize;

use crate::failure::{CmdResult, Failure};

pub const SEED_ENV: &str = "BOOSTLAB_SEED";

const FIELDS: &[&str] = &[
    "algo",
    "gamma",
    "epsilon",
    "delta",
    "estimator",
    "projection",
    "learner",
    "task",
    "data",
    "iterations",
    "interval",
    "zeta",
    "seed",
    "dense_trace",
    "contract",
];

/// Run parameters; every flag may also come from a `key = value` file.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Key-value config file; flags override its entries
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// kale or quantumboost
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Total failure probability of the projections
    #[arg(long)]
    pub delta: Option<f64>,
    /// exact-pass, monte-carlo or simulated-quantum
    #[arg(long)]
    pub estimator: Option<String>,
    /// approximate or exact (quantumboost only)
    #[arg(long)]
    pub projection: Option<String>,
    /// planted or stump
    #[arg(long)]
    pub learner: Option<String>,
    /// Synthetic task, e.g. junta:k=3,n=20,m=2000
    #[arg(long)]
    pub task: Option<String>,
    /// CSV training set (features then a +-1 label per row)
    #[arg(long, value_name = "CSV")]
    pub data: Option<PathBuf>,
    /// Override the number of iterations T
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Override the projection interval K
    #[arg(long)]
    pub interval: Option<usize>,
    /// Override the projection precision
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Seed for all random streams (default: $BOOSTLAB_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Materialize every measure and check the potential bounds
    #[arg(long)]
    pub dense_trace: bool,
    /// abort or warn on weak-learner contract violations
    #[arg(long)]
    pub contract: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    Planted,
    Stump,
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "planted" => Ok(LearnerKind::Planted),
            "stump" => Ok(LearnerKind::Stump),
            other => Err(format!("unknown learner `{other}` (expected planted or stump)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Task(TaskSpec),
    Csv(PathBuf),
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub boost: BoostConfig,
    pub learner: LearnerKind,
    pub input: Input,
}

impl RunConfig {
    pub fn load_data(&self) -> CmdResult<TrainingSet> {
        match &self.input {
            Input::Task(spec) => Ok(spec.generate()?),
            Input::Csv(path) => Ok(TrainingSet::from_csv_path(path)?),
        }
    }

    pub fn make_learner(&self, m: usize) -> Box<dyn WeakLearner + Send> {
        match self.learner {
            LearnerKind::Planted => {
                let mut rng = substream(self.boost.seed, "learner");
                Box::new(PlantedLearner::new(PlantedLearnerConfig::shuffled(m, self.boost.gamma, &mut rng)))
            }
            LearnerKind::Stump => Box::new(StumpLearner::new(64)),
        }
    }
}

pub fn mode_name(mode: EstimatorMode) -> &'static str {
    match mode {
        EstimatorMode::ExactPass => "exact-pass",
        EstimatorMode::MonteCarlo => "monte-carlo",
        EstimatorMode::SimulatedQuantum => "simulated-quantum",
    }
}

fn config_err(field: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("field `{field}`: {msg}"))
}

fn read_file(path: &PathBuf) -> CmdResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (key, value) in parse_kv_lines(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))? {
        let key = key.replace('-', "_");
        if !FIELDS.contains(&key.as_str()) {
            return Err(Failure::Config(format!("{}: unknown field `{key}`", path.display())));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Failure::Config(format!("{}: field `{key}` given twice", path.display())));
        }
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, field: &str) -> CmdResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(field)
        .map(|v| v.parse::<T>().map_err(|e| config_err(field, format!("`{v}`: {e}"))))
        .transpose()
}

fn parse_named<T: FromStr>(value: Option<String>, field: &str) -> CmdResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .map(|v| v.parse::<T>().map_err(|e| config_err(field, e)))
        .transpose()
}

fn env_seed() -> CmdResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| Failure::Config(format!("{SEED_ENV}=`{v}`: {e}"))),
        Err(_) => Ok(None),
    }
}

impl RunArgs {
    /// Merges flags over the config file over defaults and validates.
    pub fn resolve(&self) -> CmdResult<RunConfig> {
        let file = match &self.config {
            Some(p) => read_file(p)?,
            None => BTreeMap::new(),
        };
        let algo: Algorithm =
            parse_named(pick(self.algo.clone(), &file, "algo")?, "algo")?.unwrap_or(Algorithm::QuantumBoost);
        let gamma: f64 = pick(self.gamma, &file, "gamma")?.ok_or_else(|| config_err("gamma", "missing (use --gamma)"))?;
        let epsilon: f64 =
            pick(self.epsilon, &file, "epsilon")?.ok_or_else(|| config_err("epsilon", "missing (use --epsilon)"))?;
        let seed = match pick(self.seed, &file, "seed")? {
            Some(s) => s,
            None => env_seed()?.unwrap_or(0),
        };

        let mut boost = BoostConfig::new(algo, gamma, epsilon).with_seed(seed);
        if let Some(d) = pick(self.delta, &file, "delta")? {
            boost.delta = d;
        }
        if let Some(e) = parse_named::<EstimatorMode>(pick(self.estimator.clone(), &file, "estimator")?, "estimator")? {
            boost.estimator = e;
        }
        if let Some(p) = parse_named::<ProjectionMode>(pick(self.projection.clone(), &file, "projection")?, "projection")? {
            boost.projection = p;
        }
        if let Some(c) = parse_named::<ContractPolicy>(pick(self.contract.clone(), &file, "contract")?, "contract")? {
            boost.contract = c;
        }
        boost.iterations = pick(self.iterations, &file, "iterations")?;
        boost.interval = pick(self.interval, &file, "interval")?;
        boost.zeta = pick(self.zeta, &file, "zeta")?;
        boost.dense_trace = self.dense_trace || pick::<bool>(None, &file, "dense_trace")?.unwrap_or(false);
        boost.validate().map_err(|e| Failure::Config(e.to_string()))?;

        let learner = parse_named::<LearnerKind>(pick(self.learner.clone(), &file, "learner")?, "learner")?
            .unwrap_or(LearnerKind::Planted);

        let task = pick(self.task.clone(), &file, "task")?;
        let data = pick(self.data.clone(), &file, "data")?;
        let input = match (task, data) {
            (Some(_), Some(_)) => return Err(config_err("task", "give either a task or a data file, not both")),
            (Some(t), None) => Input::Task(TaskSpec::parse(&t, seed).map_err(|e| config_err("task", e))?),
            (None, Some(p)) => Input::Csv(p),
            (None, None) => return Err(config_err("task", "missing (use --task or --data)")),
        };
        Ok(RunConfig { boost, learner, input })
    }
}
