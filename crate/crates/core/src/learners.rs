//! Weak learners: a planted learner of exactly controlled advantage and a
//! sample-driven decision stump.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, TrainingSet};
use crate::engine::{Hypothesis, Stump};

/// What the engine hands a weak learner at each iteration.
pub struct LearnerInput<'a> {
    pub data: &'a TrainingSet,
    /// `D^t` over the training indices.
    pub distribution: &'a [f64],
    /// Indices drawn from `D^t`.
    pub samples: &'a [usize],
}

pub trait WeakLearner {
    /// Examples requested per call (`W`).
    fn samples_per_call(&self) -> usize {
        64
    }

    fn learn(&mut self, input: &LearnerInput<'_>) -> Hypothesis;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedLearnerConfig {
    pub gamma: f64,
    /// Fixed permutation of the training indices; the hypothesis agrees with
    /// the labels on a prefix of it.
    pub tie_order: Vec<usize>,
}

impl PlantedLearnerConfig {
    pub fn identity(m: usize, gamma: f64) -> Self {
        Self {
            gamma,
            tie_order: (0..m).collect(),
        }
    }

    pub fn shuffled<R: Rng + ?Sized>(m: usize, gamma: f64, rng: &mut R) -> Self {
        let mut tie_order: Vec<usize> = (0..m).collect();
        tie_order.shuffle(rng);
        Self { gamma, tie_order }
    }
}

/// Agrees with the labels on the shortest prefix of `tie_order` whose
/// `D`-weight reaches `1/2 + gamma`, and disagrees everywhere else. The
/// achieved advantage overshoots `gamma` by at most `max_i D(i)`.
pub fn planted_weak_learn(distribution: &[f64], labels: &[Label], config: &PlantedLearnerConfig) -> Hypothesis {
    let goal = 0.5 + config.gamma - 1e-12;
    let mut predictions: Vec<Label> = labels.iter().map(|&y| -y).collect();
    let mut mass = 0.0;
    for &i in &config.tie_order {
        if mass >= goal {
            break;
        }
        predictions[i] = labels[i];
        mass += distribution[i];
    }
    Hypothesis::Table { predictions }
}

#[derive(Debug, Clone)]
pub struct PlantedLearner {
    config: PlantedLearnerConfig,
}

impl PlantedLearner {
    pub fn new(config: PlantedLearnerConfig) -> Self {
        Self { config }
    }
}

impl WeakLearner for PlantedLearner {
    fn samples_per_call(&self) -> usize {
        64
    }

    fn learn(&mut self, input: &LearnerInput<'_>) -> Hypothesis {
        planted_weak_learn(input.distribution, input.data.labels(), &self.config)
    }
}

/// The stump maximizing agreement on the sample (with multiplicity).
pub fn stump_weak_learn(data: &TrainingSet, samples: &[usize]) -> Stump {
    assert!(!samples.is_empty(), "stump learner needs at least one sample");
    let total = samples.len();
    let mut best = (0usize, Stump { feature: 0, threshold: f64::NEG_INFINITY, polarity: 1 });
    let mut first = true;
    let mut order: Vec<usize> = samples.to_vec();
    for feature in 0..data.dim() {
        order.sort_by(|&a, &b| data.point(a)[feature].total_cmp(&data.point(b)[feature]));
        let positives = order.iter().filter(|&&i| data.label(i) > 0).count();
        // split before position j: left predicted -1, right +1 (polarity +1)
        let mut left_neg = 0usize;
        let mut left_pos = 0usize;
        for j in 0..=total {
            let boundary = j == 0
                || j == total
                || data.point(order[j - 1])[feature] < data.point(order[j])[feature];
            if boundary {
                let agree_pos = left_neg + (positives - left_pos);
                let threshold = if j == 0 {
                    data.point(order[0])[feature] - 1.0
                } else if j == total {
                    data.point(order[total - 1])[feature]
                } else {
                    0.5 * (data.point(order[j - 1])[feature] + data.point(order[j])[feature])
                };
                for (agree, polarity) in [(agree_pos, 1), (total - agree_pos, -1)] {
                    if first || agree > best.0 {
                        best = (agree, Stump { feature, threshold, polarity });
                        first = false;
                    }
                }
            }
            if j < total {
                if data.label(order[j]) > 0 {
                    left_pos += 1;
                } else {
                    left_neg += 1;
                }
            }
        }
    }
    best.1
}

#[derive(Debug, Clone)]
pub struct StumpLearner {
    samples: usize,
}

impl StumpLearner {
    pub fn new(samples: usize) -> Self {
        Self { samples: samples.max(1) }
    }
}

impl WeakLearner for StumpLearner {
    fn samples_per_call(&self) -> usize {
        self.samples
    }

    fn learn(&mut self, input: &LearnerInput<'_>) -> Hypothesis {
        Hypothesis::Stump(stump_weak_learn(input.data, input.samples))
    }
}
