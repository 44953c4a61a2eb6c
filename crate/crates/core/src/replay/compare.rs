use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::EvaluationReport;

#[derive(Debug, Error, PartialEq)]
pub enum CompareError {
    #[error("a comparison needs at least 2 reports, got {0}")]
    TooFew(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    /// 1-based position by recomputed MMRE.
    pub rank: usize,
    pub label: String,
    pub mmre_percent: f64,
    pub reported_mmre_percent: Option<f64>,
    pub pred25: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub title: String,
    /// Ascending by recomputed MMRE; ties keep input order.
    pub entries: Vec<ComparisonEntry>,
    pub winner: String,
    /// Lowest printed MMRE, when every report carries one.
    pub winner_by_reported: Option<String>,
    /// `(label, MMRE%)` in input order, for bar charts.
    pub chart: Vec<(String, f64)>,
}

/// Ranks reports by recomputed MMRE (lowest is best).
pub fn comparison_report(title: &str, reports: &[EvaluationReport]) -> Result<Comparison, CompareError> {
    if reports.len() < 2 {
        return Err(CompareError::TooFew(reports.len()));
    }
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| reports[a].mmre.total_cmp(&reports[b].mmre));
    let entries: Vec<ComparisonEntry> = order
        .iter()
        .enumerate()
        .map(|(i, &idx)| {
            let r = &reports[idx];
            ComparisonEntry {
                rank: i + 1,
                label: r.label.clone(),
                mmre_percent: r.mmre_percent,
                reported_mmre_percent: r.reported_mmre_percent,
                pred25: r.pred25,
                n: r.n,
            }
        })
        .collect();

    let reported: Option<Vec<f64>> = reports.iter().map(|r| r.reported_mmre_percent).collect();
    let winner_by_reported = reported.map(|vals| {
        let best = (0..vals.len())
            .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
            .expect("non-empty");
        reports[best].label.clone()
    });

    Ok(Comparison {
        title: title.to_string(),
        winner: entries[0].label.clone(),
        entries,
        winner_by_reported,
        chart: reports.iter().map(|r| (r.label.clone(), r.mmre_percent)).collect(),
    })
}
