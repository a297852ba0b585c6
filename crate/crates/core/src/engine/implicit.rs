use serde::{Deserialize, Serialize};

use super::LossVector;

/// One step of the recursive weight representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub loss: LossVector,
    /// Projection constant applied after the update, if this step projected.
    pub c_tilde: Option<f64>,
}

/// `M^t` stored as its update history: a base value, the loss vectors of
/// `h_1..h_{t-1}` and the projection constants. Entry evaluation replays
/// the history: start at `eps`, multiply by `1 - gamma` where the loss is
/// one, and apply `min(1, c * v)` at projection steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicitMeasure {
    base: f64,
    decay: f64,
    m: usize,
    events: Vec<Event>,
}

impl ImplicitMeasure {
    /// `M^1`: the uniform measure with weight `eps * m`.
    pub fn new(m: usize, epsilon: f64, gamma: f64) -> Self {
        Self {
            base: epsilon,
            decay: 1.0 - gamma,
            m,
            events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Index `t` of the measure currently represented (`M^t`).
    pub fn iteration(&self) -> usize {
        self.events.len() + 1
    }

    pub fn push_update(&mut self, loss: LossVector) {
        debug_assert_eq!(loss.len(), self.m);
        self.events.push(Event { loss, c_tilde: None });
    }

    pub fn push_update_and_project(&mut self, loss: LossVector, c_tilde: f64) {
        debug_assert_eq!(loss.len(), self.m);
        self.events.push(Event {
            loss,
            c_tilde: Some(c_tilde),
        });
    }

    /// `M^t(x_i)` for the current `t`, in `O(t)`.
    pub fn entry(&self, i: usize) -> f64 {
        self.entry_at(i, self.iteration())
    }

    /// `M^t(x_i)` replaying only the first `t - 1` events.
    pub fn entry_at(&self, i: usize, t: usize) -> f64 {
        let mut v = self.base;
        for ev in &self.events[..t - 1] {
            if ev.loss.get(i) {
                v *= self.decay;
            }
            if let Some(c) = ev.c_tilde {
                v = (c * v).min(1.0);
            }
        }
        v
    }

    pub fn materialize(&self) -> Vec<f64> {
        self.materialize_at(self.iteration())
    }

    pub fn materialize_at(&self, t: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.entry_at(i, t)).collect()
    }
}
