//! Measures over the training indices, their normalized distributions, and
//! the KL / relative-entropy divergences relating them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A discrete measure `M: [m] -> [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(0.0..=1.0).contains(*w))
        {
            return Err(Error::InvalidMeasure { index, value });
        }
        Ok(Self { weights })
    }

    /// The constant measure with every entry equal to `value`.
    pub fn constant(m: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; m])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn entries(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.weights
    }

    /// `|M|`, the total weight.
    pub fn weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// `mu(M) = |M| / m`.
    pub fn density(&self) -> f64 {
        if self.weights.is_empty() {
            return 0.0;
        }
        self.weight() / self.weights.len() as f64
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn in_high_density_set(&self, epsilon: f64) -> bool {
        self.density() >= epsilon
    }
}

/// Density of a measure. Free-function form of [`Measure::density`].
pub fn density(m: &Measure) -> f64 {
    m.density()
}

/// A probability distribution over the training indices, together with the
/// smoothness parameter it is certified for: every entry is at most
/// `1 / (epsilon * m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothDistribution {
    probs: Vec<f64>,
    epsilon: f64,
}

impl SmoothDistribution {
    /// Wraps a probability vector and certifies it with the tightest
    /// smoothness parameter, `1 / (m * max_i p_i)`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::ZeroWeight);
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidMeasure { index, value });
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("probabilities sum to {total}, not 1")));
        }
        let max = probs.iter().copied().fold(0.0, f64::max);
        let epsilon = (1.0 / (max * probs.len() as f64)).min(1.0);
        Ok(Self { probs, epsilon })
    }

    /// Uniform distribution over the given indices of an `m`-point domain.
    pub fn uniform_over(m: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::ZeroWeight);
        }
        let mut probs = vec![0.0; m];
        let p = 1.0 / indices.len() as f64;
        for &i in indices {
            probs[i] = p;
        }
        Self::from_probs(probs)
    }

    pub fn uniform(m: usize) -> Self {
        Self {
            probs: vec![1.0 / m as f64; m],
            epsilon: 1.0,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// The certified smoothness parameter.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// True when `max_i p_i <= 1/(epsilon m) + 1e-12`.
    pub fn is_smooth(&self, epsilon: f64) -> bool {
        self.max_prob() <= 1.0 / (epsilon * self.probs.len() as f64) + 1e-12
    }

    /// `<D, v>` for a real vector `v`.
    pub fn dot(&self, v: &[f64]) -> f64 {
        compensated_sum(self.probs.iter().zip(v).map(|(p, x)| p * x))
    }

    /// `<D, l>` for a Boolean vector `l`.
    pub fn mass_on(&self, bits: &[bool]) -> f64 {
        compensated_sum(
            self.probs
                .iter()
                .zip(bits)
                .filter(|(_, &b)| b)
                .map(|(p, _)| *p),
        )
    }
}

/// `D_M = M / |M|`, certified `mu(M)`-smooth.
pub fn normalize(m: &Measure) -> Result<SmoothDistribution> {
    normalize_entries(m.entries())
}

/// [`normalize`] over a raw entry slice (entries assumed in `[0, 1]`).
pub fn normalize_entries(entries: &[f64]) -> Result<SmoothDistribution> {
    let w = compensated_sum(entries.iter().copied());
    if !(w > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let probs = entries.iter().map(|x| x / w).collect();
    Ok(SmoothDistribution {
        probs,
        epsilon: (w / entries.len() as f64).min(1.0),
    })
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Unnormalized KL divergence `sum_x M log(M/N) + N - M` between raw entry
/// vectors.
pub fn kl_entries(m: &[f64], n: &[f64]) -> Result<f64> {
    check_lengths(m.len(), n.len())?;
    let mut terms = Vec::with_capacity(m.len());
    for (i, (&a, &b)) in m.iter().zip(n).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::SupportViolation { index: i });
            }
            terms.push(a * (a / b).ln() + b - a);
        } else {
            terms.push(b);
        }
    }
    Ok(compensated_sum(terms))
}

/// `KL(M || N)` for measures.
pub fn kl_measures(m: &Measure, n: &Measure) -> Result<f64> {
    kl_entries(m.entries(), n.entries())
}

/// Relative entropy `sum_x p log(p/q)` between raw probability vectors.
pub fn relative_entropy_probs(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p.len(), q.len())?;
    let mut terms = Vec::with_capacity(p.len());
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::SupportViolation { index: i });
            }
            terms.push(a * (a / b).ln());
        }
    }
    Ok(compensated_sum(terms))
}

/// `RE(D_A || D_B)`.
pub fn relative_entropy(a: &SmoothDistribution, b: &SmoothDistribution) -> Result<f64> {
    relative_entropy_probs(a.probs(), b.probs())
}

/// `KL(A||B) - [|A| RE(D_A||D_B) + |A| log(|A|/|B|) + |B| - |A|]`.
///
/// Zero up to rounding for every valid pair; exists as a test oracle.
pub fn kl_re_identity_residual(a: &Measure, b: &Measure) -> Result<f64> {
    check_lengths(a.len(), b.len())?;
    let wa = a.weight();
    let wb = b.weight();
    if !(wa > 0.0) || !(wb > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let kl = kl_measures(a, b)?;
    let re = relative_entropy(&normalize(a)?, &normalize(b)?)?;
    Ok(kl - (wa * re + wa * (wa / wb).ln() + wb - wa))
}
