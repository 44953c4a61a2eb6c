use serde::{Deserialize, Serialize};

use super::NeuralError;
use crate::dataset::{Dataset, Feature, MinMaxParams, ProjectRecord};

/// Generalized regression network: a Gaussian-kernel weighted average of
/// the training targets in normalized feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrnnModel {
    pub norm: MinMaxParams,
    /// Normalized features and raw target (weeks) per training record.
    pub samples: Vec<(Vec<f64>, f64)>,
    pub sigma: f64,
}

impl GrnnModel {
    pub fn fit(train: &Dataset, features: &[Feature], sigma: f64) -> Result<Self, NeuralError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(NeuralError::BadSigma(sigma));
        }
        if train.is_empty() {
            return Err(NeuralError::EmptyTrain);
        }
        let norm = MinMaxParams::fit(train, features)?;
        let samples = train.records().iter().map(|r| (norm.transform(r), r.rde)).collect();
        Ok(GrnnModel { norm, samples, sigma })
    }

    fn target_bounds(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, y)| {
                (lo.min(*y), hi.max(*y))
            })
    }
}

/// `sum(y_i k_i) / sum(k_i)` with `k_i = exp(-d_i^2 / (2 sigma^2))`; the
/// largest exponent is subtracted first so at least one kernel equals 1.
pub fn grnn_predict(model: &GrnnModel, record: &ProjectRecord) -> f64 {
    let q = model.norm.transform(record);
    let scale = 2.0 * model.sigma * model.sigma;
    let exponents: Vec<f64> = model
        .samples
        .iter()
        .map(|(x, _)| {
            let d2: f64 = x.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
            -d2 / scale
        })
        .collect();
    let top = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (num, den) = exponents
        .iter()
        .zip(&model.samples)
        .fold((0.0, 0.0), |(n, d), (e, (_, y))| {
            let k = (e - top).exp();
            (n + k * y, d + k)
        });
    let (lo, hi) = model.target_bounds();
    (num / den).clamp(lo, hi)
}
