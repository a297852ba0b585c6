//! Synthetic classification tasks over `{-1, +1}^n`.

use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, TrainingSet};
use crate::engine::evaluate_majority;
use crate::error::{Error, Result};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    /// `y = MAJ(x_1, ..., x_k)`.
    JuntaMajority,
    /// `y = x_1`.
    Literal,
    /// Junta majority with `floor(noise_rate * m)` labels flipped.
    NoisyLabels,
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "junta" | "junta-majority" | "k-junta-majority" => Ok(Self::JuntaMajority),
            "literal" => Ok(Self::Literal),
            "noisy" | "noisy-labels" => Ok(Self::NoisyLabels),
            other => Err(Error::Config(format!("unknown task kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTask {
    pub kind: TaskKind,
    pub n: usize,
    pub k: usize,
    pub noise_rate: f64,
    pub seed: u64,
}

impl SyntheticTask {
    pub fn junta(n: usize, k: usize, seed: u64) -> Self {
        Self {
            kind: TaskKind::JuntaMajority,
            n,
            k,
            noise_rate: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("task needs n >= 1".into()));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::Config(format!("task needs 1 <= k <= n (k = {}, n = {})", self.k, self.n)));
        }
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Config(format!("noise_rate {} outside [0, 1]", self.noise_rate)));
        }
        Ok(())
    }

    fn clean_label(&self, x: &[f64]) -> Label {
        match self.kind {
            TaskKind::Literal => x[0] as Label,
            TaskKind::JuntaMajority | TaskKind::NoisyLabels => {
                evaluate_majority(x[..self.k].iter().map(|&v| v as Label))
            }
        }
    }
}

/// Number of labels flipped for `m` examples.
pub fn flipped_count(task: &SyntheticTask, m: usize) -> usize {
    (task.noise_rate * m as f64).floor() as usize
}

/// Generates `m` examples. Features and noise come from separate seeded
/// streams, so a noisy task shares its points with the clean task of the
/// same seed.
pub fn generate_task(task: &SyntheticTask, m: usize) -> Result<TrainingSet> {
    task.validate()?;
    if m == 0 {
        return Err(Error::Config("task needs m >= 1".into()));
    }
    let mut rng = substream(task.seed, "task-features");
    let points: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..task.n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect();
    let mut labels: Vec<Label> = points.iter().map(|x| task.clean_label(x)).collect();
    let flips = flipped_count(task, m);
    if flips > 0 {
        let mut noise = substream(task.seed, "task-noise");
        for i in sample_indices(&mut noise, m, flips) {
            labels[i] = -labels[i];
        }
    }
    TrainingSet::new(points, labels)
}

/// A task together with its example count, written `kind:key=value,...`
/// (keys `n`, `k`, `m`, `noise`/`noise_rate`, `seed`), e.g.
/// `junta:k=3,n=20,m=2000`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task: SyntheticTask,
    pub m: usize,
}

impl TaskSpec {
    /// Parses `key=value` pairs; `kind` may be given as a pair too.
    pub fn from_pairs<'a, I>(kind: Option<&str>, pairs: I, default_seed: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut kind = kind.map(TaskKind::from_str).transpose()?;
        let (mut n, mut k, mut m, mut noise, mut seed) = (None, None, None, 0.0, default_seed);
        for (key, value) in pairs {
            let bad = |e: &dyn std::fmt::Display| Error::Config(format!("task field `{key}`: {e}"));
            match key.trim() {
                "kind" => kind = Some(value.trim().parse()?),
                "n" => n = Some(value.trim().parse::<usize>().map_err(|e| bad(&e))?),
                "k" => k = Some(value.trim().parse::<usize>().map_err(|e| bad(&e))?),
                "m" => m = Some(value.trim().parse::<usize>().map_err(|e| bad(&e))?),
                "noise" | "noise_rate" => noise = value.trim().parse::<f64>().map_err(|e| bad(&e))?,
                "seed" => seed = value.trim().parse::<u64>().map_err(|e| bad(&e))?,
                other => return Err(Error::Config(format!("unknown task field `{other}`"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Config("task kind missing".into()))?;
        let n = n.ok_or_else(|| Error::Config("task field `n` missing".into()))?;
        let k = match kind {
            TaskKind::Literal => k.unwrap_or(1),
            _ => k.ok_or_else(|| Error::Config("task field `k` missing".into()))?,
        };
        let m = m.ok_or_else(|| Error::Config("task field `m` missing".into()))?;
        let spec = Self {
            task: SyntheticTask {
                kind,
                n,
                k,
                noise_rate: noise,
                seed,
            },
            m,
        };
        spec.task.validate()?;
        Ok(spec)
    }

    /// Parses the compact `kind:key=value,...` form.
    pub fn parse(s: &str, default_seed: u64) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let pairs = rest
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .ok_or_else(|| Error::Config(format!("task field `{p}` is not key=value")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(Some(kind.trim()), pairs, default_seed)
    }

    /// Parses key-value text, one `key = value` per line, `#` comments.
    pub fn parse_kv_text(text: &str, default_seed: u64) -> Result<Self> {
        let pairs = crate::parse_kv_lines(text)?;
        Self::from_pairs(None, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())), default_seed)
    }

    pub fn generate(&self) -> Result<TrainingSet> {
        generate_task(&self.task, self.m)
    }
}
