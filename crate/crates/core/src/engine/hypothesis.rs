use serde::{Deserialize, Serialize};

use crate::dataset::{Label, TrainingSet};

/// A single-coordinate threshold classifier: predicts `polarity` when
/// `x[feature] > threshold`, `-polarity` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: Label,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> Label {
        if x[self.feature] > self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

/// A `+-1` classifier produced by a weak learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hypothesis {
    Stump(Stump),
    /// Predictions tabulated per training index; only defined on the
    /// training set it was built for.
    Table { predictions: Vec<Label> },
}

impl Hypothesis {
    /// Prediction on training example `i`.
    pub fn predict(&self, data: &TrainingSet, i: usize) -> Label {
        match self {
            Hypothesis::Stump(s) => s.predict(data.point(i)),
            Hypothesis::Table { predictions } => predictions[i],
        }
    }

    /// Prediction on an arbitrary point, when the hypothesis is defined there.
    pub fn predict_point(&self, x: &[f64]) -> Option<Label> {
        match self {
            Hypothesis::Stump(s) => Some(s.predict(x)),
            Hypothesis::Table { .. } => None,
        }
    }
}

/// Boolean loss `l(x_i) = [h(x_i) = y_i]`: one exactly on correctly
/// classified examples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossVector(Vec<bool>);

impl LossVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn of(h: &Hypothesis, data: &TrainingSet) -> Self {
        Self((0..data.len()).map(|i| h.predict(data, i) == data.label(i)).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

/// `+1` iff strictly more than half the votes are `+1`; ties give `-1`.
pub fn evaluate_majority<I: IntoIterator<Item = Label>>(votes: I) -> Label {
    let (mut plus, mut total) = (0usize, 0usize);
    for v in votes {
        total += 1;
        if v > 0 {
            plus += 1;
        }
    }
    if 2 * plus > total {
        1
    } else {
        -1
    }
}

/// Sign rule on a vote sum, consistent with [`evaluate_majority`].
pub fn majority_from_sum(sum: i64) -> Label {
    if sum > 0 {
        1
    } else {
        -1
    }
}

/// `H = MAJ(h_1, ..., h_T)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MajorityVote {
    hypotheses: Vec<Hypothesis>,
}

impl MajorityVote {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, h: Hypothesis) {
        self.hypotheses.push(h);
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn predict(&self, data: &TrainingSet, i: usize) -> Label {
        evaluate_majority(self.hypotheses.iter().map(|h| h.predict(data, i)))
    }

    pub fn predict_point(&self, x: &[f64]) -> Option<Label> {
        let votes: Option<Vec<Label>> = self.hypotheses.iter().map(|h| h.predict_point(x)).collect();
        votes.map(evaluate_majority)
    }

    /// Fraction of examples misclassified.
    pub fn empirical_error(&self, data: &TrainingSet) -> f64 {
        let wrong = (0..data.len()).filter(|&i| self.predict(data, i) != data.label(i)).count();
        wrong as f64 / data.len() as f64
    }
}
