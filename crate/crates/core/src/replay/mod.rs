//! Replays the recorded prediction tables through [`crate::metrics`] and
//! audits every printed figure against the recomputation.
//!
//! Recorded values are never modified. Each printed cell gets an
//! [`AuditNote`]; figures that cannot be reconciled are reported with both
//! the printed and the recomputed value.

mod compare;
pub mod tables;

use serde::{Deserialize, Serialize};

use crate::metrics::{self, EvaluationReport, PredictionPair};
use tables::{NnColumn, MAMDANI_LABEL, TABLE1, TABLE2, TABLE4};

pub use compare::{comparison_report, CompareError, Comparison, ComparisonEntry};

/// Largest absolute difference (in ratio units) still called a match.
pub const MATCH_TOLERANCE: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    RoundingMatch,
    Irreconcilable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::RoundingMatch => "rounding-match",
            Verdict::Irreconcilable => "irreconcilable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditNote {
    pub subject: String,
    pub reported: f64,
    pub recomputed: f64,
    pub verdict: Verdict,
    /// Decimals of the printed value.
    pub decimals: usize,
    /// Value is a percentage; the match tolerance is applied to value / 100.
    pub percent: bool,
    /// A discrepancy documented in advance. Known discrepancies are
    /// reported but do not count as audit failures.
    pub known: bool,
}

impl AuditNote {
    pub fn judge(subject: impl Into<String>, reported: f64, recomputed: f64, decimals: usize, percent: bool) -> Self {
        let scale = if percent { 100.0 } else { 1.0 };
        let verdict = if ((reported - recomputed) / scale).abs() <= MATCH_TOLERANCE {
            Verdict::Match
        } else if format!("{reported:.decimals$}") == format!("{recomputed:.decimals$}") {
            Verdict::RoundingMatch
        } else {
            Verdict::Irreconcilable
        };
        AuditNote {
            subject: subject.into(),
            reported,
            recomputed,
            verdict,
            decimals,
            percent,
            known: false,
        }
    }

    fn known(mut self) -> Self {
        self.known = true;
        self
    }

    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Irreconcilable && !self.known
    }

    /// One-line human summary, e.g.
    /// `[irreconcilable] Table 1 Mamdani FIS MMRE%: reported 3.89, recomputed 6.29`.
    pub fn line(&self) -> String {
        let d = self.decimals;
        let tag = if self.known && self.verdict == Verdict::Irreconcilable {
            " (known)"
        } else {
            ""
        };
        format!(
            "[{}]{tag} {}: reported {:.d$}, recomputed {:.d$}",
            self.verdict.as_str(),
            self.subject,
            self.reported,
            self.recomputed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Replay {
    pub reports: Vec<EvaluationReport>,
    pub audit: Vec<AuditNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table4Replay {
    /// All 41 records.
    pub full: EvaluationReport,
    /// Serials 31-41, the records the networks were tested on.
    pub subset: EvaluationReport,
    pub audit: Vec<AuditNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Replay {
    pub comparison: Comparison,
    /// Same comparison with the FIS restricted to serials 31-41.
    pub subset_comparison: Comparison,
    pub audit: Vec<AuditNote>,
}

const SPLIT_NOTE: &str = "test set = serials 31-41 (11 records); serial 31 is also the last of the 31 training records, although the prose mentions 10 test inputs";

fn must<T>(r: Result<T, metrics::MetricsError>) -> T {
    r.expect("recorded tables hold positive actual efforts")
}

/// Recomputes all 33 MREs and the three MMREs of the neural-network table.
pub fn replay_table2() -> Table2Replay {
    let mut reports = Vec::new();
    let mut audit = Vec::new();
    for col in NnColumn::ALL {
        let label = col.label();
        let pairs: Vec<PredictionPair> = TABLE2
            .iter()
            .map(|r| PredictionPair::new(r.serial, r.actual, col.predicted(r)))
            .collect();
        let report = must(metrics::evaluate(label, &pairs))
            .with_reported(col.printed_mmre_percent())
            .with_note(SPLIT_NOTE);
        for (row, m) in TABLE2.iter().zip(&report.mres) {
            audit.push(AuditNote::judge(
                format!("Table 2 {label} MRE serial {}", row.serial),
                col.printed_mre(row),
                *m,
                2,
                false,
            ));
        }
        let exact_sum: f64 = report.mres.iter().sum();
        audit.push(AuditNote::judge(
            format!("Table 2 {label} MRE sum row"),
            col.printed_mre_sum(),
            exact_sum,
            2,
            false,
        ));
        let rounded_sum: f64 = TABLE2.iter().map(|r| col.printed_mre(r)).sum();
        audit.push(
            AuditNote::judge(
                format!("Table 2 {label} MRE sum row vs sum of printed MREs"),
                col.printed_mre_sum(),
                rounded_sum,
                2,
                false,
            )
            .known(),
        );
        audit.push(AuditNote::judge(
            format!("Table 2 {label} MMRE%"),
            col.printed_mmre_percent(),
            report.mmre_percent,
            2,
            true,
        ));
        reports.push(report);
    }
    Table2Replay { reports, audit }
}

/// Recomputes the 41 FIS MREs, the full-table MMRE and the serial 31-41
/// subset MMRE, and audits them against the printed figures.
pub fn replay_table4() -> Table4Replay {
    let pairs: Vec<PredictionPair> = TABLE4
        .iter()
        .map(|r| PredictionPair::new(r.serial, r.actual, r.fis))
        .collect();
    let reported = table1_value(MAMDANI_LABEL);
    let full = must(metrics::evaluate(MAMDANI_LABEL, &pairs)).with_reported(reported);
    let subset_pairs: Vec<PredictionPair> = pairs.iter().filter(|p| p.serial >= 31).copied().collect();
    let subset = must(metrics::evaluate(
        &format!("{MAMDANI_LABEL} (serials 31-41)"),
        &subset_pairs,
    ));

    let mut audit: Vec<AuditNote> = TABLE4
        .iter()
        .zip(&full.mres)
        .map(|(row, m)| AuditNote::judge(format!("Table 4 MRE serial {}", row.serial), row.mre, *m, 3, false))
        .collect();
    let full_note = AuditNote::judge(
        format!("Table 1 {MAMDANI_LABEL} MMRE%"),
        reported,
        full.mmre_percent,
        2,
        true,
    )
    .known();
    let subset_note = AuditNote::judge(
        format!("Table 1 {MAMDANI_LABEL} MMRE% vs serials 31-41 subset"),
        reported,
        subset.mmre_percent,
        2,
        true,
    )
    .known();
    let explain = format!(
        "printed MMRE {reported:.2}% is not derivable from the printed rows: all 41 rows give {:.2}%, serials 31-41 give {:.2}%",
        full.mmre_percent, subset.mmre_percent
    );
    audit.push(full_note);
    audit.push(subset_note);
    Table4Replay {
        full: full.with_note(explain.clone()),
        subset: subset.with_note(explain),
        audit,
    }
}

fn table1_value(label: &str) -> f64 {
    tables::table1_reported(label).expect("label is in the table")
}

/// Rebuilds the model comparison from the recomputed aggregates and audits
/// each printed MMRE%.
pub fn replay_table1() -> Table1Replay {
    let t2 = replay_table2();
    let t4 = replay_table4();
    let mut reports = t2.reports.clone();
    reports.push(t4.full.clone());
    let comparison = comparison_report("Models by MMRE (recomputed)", &reports).expect("four reports");

    let mut subset_reports = t2.reports.clone();
    subset_reports.push(t4.subset.clone().with_reported(table1_value(MAMDANI_LABEL)));
    let subset_comparison =
        comparison_report("Models by MMRE, FIS restricted to serials 31-41", &subset_reports).expect("four reports");

    let audit = TABLE1
        .iter()
        .map(|(label, printed)| {
            let recomputed = reports
                .iter()
                .find(|r| r.label == *label)
                .map(|r| r.mmre_percent)
                .expect("every printed model is replayed");
            let note = AuditNote::judge(format!("Table 1 {label} MMRE%"), *printed, recomputed, 2, true);
            if *label == MAMDANI_LABEL {
                note.known()
            } else {
                note
            }
        })
        .collect();
    Table1Replay {
        comparison,
        subset_comparison,
        audit,
    }
}
