use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::infomath::{entropy, Entropy, Pmf};

/// Distribution of the ground-truth label `B(X)` of a dataset item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceModel {
    pmf: Pmf,
}

impl SourceModel {
    pub fn new(pmf: Pmf) -> Self {
        SourceModel { pmf }
    }

    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        Ok(SourceModel::new(Pmf::new(probabilities)?))
    }

    /// Equiprobable labels over `n_labels` clusters.
    pub fn uniform(n_labels: usize) -> Result<Self> {
        Ok(SourceModel::new(Pmf::uniform(n_labels)?))
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    /// Number of labels `N`.
    pub fn n_labels(&self) -> usize {
        self.pmf.len()
    }

    pub fn entropy(&self) -> Entropy {
        entropy(&self.pmf)
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.n_labels() as f64;
        self.pmf
            .probabilities()
            .iter()
            .all(|&p| (p - 1.0 / n).abs() <= 1e-12)
    }

    pub fn sampler(&self) -> LabelSampler {
        let mut acc = 0.0;
        let cumulative = self
            .pmf
            .probabilities()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        LabelSampler { cumulative }
    }
}

/// Inverse-CDF sampler for a [`SourceModel`].
#[derive(Debug, Clone)]
pub struct LabelSampler {
    cumulative: Vec<f64>,
}

impl LabelSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let last = self.cumulative.len() - 1;
        let u: f64 = rng.gen::<f64>() * self.cumulative[last];
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(last)
    }
}
