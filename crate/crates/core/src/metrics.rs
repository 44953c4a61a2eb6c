//! Accuracy indicators for effort estimates: MRE, MMRE, Pred(q) and BRE.
//!
//! Aggregates are always computed from unrounded per-project errors.
//! Rounding happens only when rendering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default Pred threshold.
pub const PRED_THRESHOLD: f64 = 0.25;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("actual effort must be > 0 (serial {serial}, got {actual})")]
    NonPositiveActual { serial: u32, actual: f64 },
    #[error("BRE needs positive operands (actual {actual}, predicted {predicted})")]
    NonPositiveOperand { actual: f64, predicted: f64 },
    #[error("at least one prediction pair is required")]
    Empty,
    #[error("threshold must be >= 0 (got {0})")]
    NegativeThreshold(f64),
    #[error("prediction for serial {0} is not finite")]
    NonFinite(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionPair {
    pub serial: u32,
    pub actual: f64,
    pub predicted: f64,
}

impl PredictionPair {
    pub fn new(serial: u32, actual: f64, predicted: f64) -> Self {
        PredictionPair {
            serial,
            actual,
            predicted,
        }
    }
}

/// Magnitude of relative error, `|actual - predicted| / actual`.
pub fn mre(actual: f64, predicted: f64) -> Result<f64, MetricsError> {
    if !(actual > 0.0) {
        return Err(MetricsError::NonPositiveActual { serial: 0, actual });
    }
    Ok((actual - predicted).abs() / actual)
}

fn pair_mres(pairs: &[PredictionPair]) -> Result<Vec<f64>, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::Empty);
    }
    pairs
        .iter()
        .map(|p| {
            if !p.predicted.is_finite() {
                return Err(MetricsError::NonFinite(p.serial));
            }
            mre(p.actual, p.predicted).map_err(|_| MetricsError::NonPositiveActual {
                serial: p.serial,
                actual: p.actual,
            })
        })
        .collect()
}

/// Mean of the unrounded MREs.
pub fn mmre(pairs: &[PredictionPair]) -> Result<f64, MetricsError> {
    let mres = pair_mres(pairs)?;
    Ok(mean(&mres))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Fraction of pairs with MRE <= `q`.
pub fn pred_at(pairs: &[PredictionPair], q: f64) -> Result<f64, MetricsError> {
    if !(q >= 0.0) {
        return Err(MetricsError::NegativeThreshold(q));
    }
    let mres = pair_mres(pairs)?;
    Ok(fraction_within(&mres, q))
}

fn fraction_within(mres: &[f64], q: f64) -> f64 {
    mres.iter().filter(|&&m| m <= q).count() as f64 / mres.len() as f64
}

/// Balanced relative error, `|actual - predicted| / min(actual, predicted)`.
pub fn bre(actual: f64, predicted: f64) -> Result<f64, MetricsError> {
    if !(actual > 0.0 && predicted > 0.0) {
        return Err(MetricsError::NonPositiveOperand { actual, predicted });
    }
    Ok((actual - predicted).abs() / actual.min(predicted))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub label: String,
    pub pairs: Vec<PredictionPair>,
    pub mres: Vec<f64>,
    pub mmre: f64,
    pub mmre_percent: f64,
    pub pred25: f64,
    /// `None` when some prediction is not positive.
    pub mean_bre_percent: Option<f64>,
    pub n: usize,
    /// MMRE% as printed in a published table, when one exists.
    #[serde(default)]
    pub reported_mmre_percent: Option<f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_reported(mut self, mmre_percent: f64) -> Self {
        self.reported_mmre_percent = Some(mmre_percent);
        self
    }

    pub fn mre_of(&self, serial: u32) -> Option<f64> {
        self.pairs.iter().position(|p| p.serial == serial).map(|i| self.mres[i])
    }
}

/// Computes every indicator for `pairs`.
pub fn evaluate(label: &str, pairs: &[PredictionPair]) -> Result<EvaluationReport, MetricsError> {
    let mres = pair_mres(pairs)?;
    let mmre = mean(&mres);
    let mut notes = Vec::new();
    let bres: Result<Vec<f64>, _> = pairs.iter().map(|p| bre(p.actual, p.predicted)).collect();
    let mean_bre_percent = match bres {
        Ok(b) => Some(mean(&b) * 100.0),
        Err(_) => {
            notes.push("mean BRE% undefined: some prediction is not positive".to_string());
            None
        }
    };
    Ok(EvaluationReport {
        label: label.to_string(),
        pairs: pairs.to_vec(),
        pred25: fraction_within(&mres, PRED_THRESHOLD),
        mmre,
        mmre_percent: mmre * 100.0,
        mean_bre_percent,
        n: mres.len(),
        mres,
        reported_mmre_percent: None,
        notes,
    })
}
