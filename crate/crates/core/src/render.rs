//! Deterministic rendering of evaluation reports, comparisons and audit
//! notes as text, CSV, JSON or an SVG bar chart.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::metrics::{EvaluationReport, PredictionPair};
use crate::replay::{AuditNote, Comparison};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),
    #[error("svg output needs a comparison to chart")]
    NothingToChart,
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(RenderError::UnsupportedFormat(other.to_string())),
        }
    }
}

/// Everything a command can emit. The JSON form of this struct is also
/// the input format of `report compare`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    #[serde(default)]
    pub reports: Vec<EvaluationReport>,
    #[serde(default)]
    pub comparisons: Vec<Comparison>,
    #[serde(default)]
    pub audit: Vec<AuditNote>,
}

impl ReportBundle {
    pub fn from_json(text: &str) -> Result<Self, RenderError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn render_report(bundle: &ReportBundle, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Text => Ok(render_text(bundle)),
        Format::Csv => Ok(render_csv(bundle)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(bundle)?;
            s.push('\n');
            Ok(s)
        }
        Format::Svg => bundle
            .comparisons
            .first()
            .map(render_svg)
            .ok_or(RenderError::NothingToChart),
    }
}

/// Renders the records of a dataset. SVG is not supported.
pub fn render_dataset(data: &Dataset, format: Format) -> Result<String, RenderError> {
    match format {
        Format::Csv => Ok(data.to_csv()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(data.records())?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let mut out = format!("source: {}\n", data.source);
            let _ = writeln!(
                out,
                "{:>6} {:>5} {:>5} {:>5} {:>6} {:>5}",
                "serial", "tcoe", "tcoa", "tcor", "cgpa", "rde"
            );
            for r in data.records() {
                let _ = writeln!(
                    out,
                    "{:>6} {:>5} {:>5} {:>5} {:>6.3} {:>5}",
                    r.serial, r.tcoe, r.tcoa, r.tcor, r.cgpa, r.rde
                );
            }
            let _ = writeln!(out, "{} records", data.len());
            Ok(out)
        }
        Format::Svg => Err(RenderError::UnsupportedFormat("svg".into())),
    }
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.decimals$}"))
}

fn render_text(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    for r in &bundle.reports {
        let _ = writeln!(out, "== {} ==", r.label);
        let _ = writeln!(out, "{:>6} {:>9} {:>10} {:>7}", "serial", "actual", "predicted", "MRE");
        for (p, m) in r.pairs.iter().zip(&r.mres) {
            let _ = writeln!(
                out,
                "{:>6} {:>9.2} {:>10.2} {:>7.2}",
                p.serial, p.actual, p.predicted, m
            );
        }
        let _ = writeln!(out, "n = {}", r.n);
        let _ = writeln!(out, "MMRE = {:.2}%", r.mmre_percent);
        if let Some(rep) = r.reported_mmre_percent {
            let _ = writeln!(out, "reported MMRE = {rep:.2}%");
        }
        let _ = writeln!(out, "Pred(0.25) = {:.3}", r.pred25);
        let _ = writeln!(out, "mean BRE = {}%", opt(r.mean_bre_percent, 2));
        for note in &r.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out.push('\n');
    }
    for c in &bundle.comparisons {
        let _ = writeln!(out, "== {} ==", c.title);
        let _ = writeln!(
            out,
            "{:>4}  {:<32} {:>10} {:>10}",
            "rank", "model", "MMRE(%)", "reported"
        );
        for e in &c.entries {
            let _ = writeln!(
                out,
                "{:>4}  {:<32} {:>10.2} {:>10}",
                e.rank,
                e.label,
                e.mmre_percent,
                opt(e.reported_mmre_percent, 2)
            );
        }
        let _ = writeln!(out, "best (recomputed): {}", c.winner);
        if let Some(w) = &c.winner_by_reported {
            let _ = writeln!(out, "best (reported): {w}");
        }
        out.push('\n');
    }
    if !bundle.audit.is_empty() {
        let _ = writeln!(out, "== audit ==");
        for n in &bundle.audit {
            let _ = writeln!(out, "{}", n.line());
        }
    }
    out
}

const PAIR_HEADER: [&str; 5] = ["model", "serial", "actual", "predicted", "mre"];
const AGG_HEADER: [&str; 5] = ["model", "mmre_percent", "pred25", "mean_bre_percent", "n"];
const CMP_HEADER: [&str; 4] = ["rank", "model", "mmre_percent", "reported_mmre_percent"];
const AUDIT_HEADER: [&str; 4] = ["subject", "reported", "recomputed", "verdict"];

fn render_csv(bundle: &ReportBundle) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let some = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    if !bundle.reports.is_empty() {
        w.write_record(PAIR_HEADER).expect("in-memory write");
        for r in &bundle.reports {
            for (p, m) in r.pairs.iter().zip(&r.mres) {
                w.write_record([
                    r.label.clone(),
                    p.serial.to_string(),
                    p.actual.to_string(),
                    p.predicted.to_string(),
                    m.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        w.write_record(AGG_HEADER).expect("in-memory write");
        for r in &bundle.reports {
            w.write_record([
                r.label.clone(),
                r.mmre_percent.to_string(),
                r.pred25.to_string(),
                some(r.mean_bre_percent),
                r.n.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    for c in &bundle.comparisons {
        w.write_record(CMP_HEADER).expect("in-memory write");
        for e in &c.entries {
            w.write_record([
                e.rank.to_string(),
                e.label.clone(),
                e.mmre_percent.to_string(),
                some(e.reported_mmre_percent),
            ])
            .expect("in-memory write");
        }
    }
    if !bundle.audit.is_empty() {
        w.write_record(AUDIT_HEADER).expect("in-memory write");
        for n in &bundle.audit {
            w.write_record([
                n.subject.clone(),
                n.reported.to_string(),
                n.recomputed.to_string(),
                n.verdict.as_str().to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Pairs and aggregates read back from CSV produced by [`render_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub label: String,
    pub pairs: Vec<(PredictionPair, f64)>,
    pub mmre_percent: f64,
    pub pred25: f64,
    pub mean_bre_percent: Option<f64>,
    pub n: usize,
}

/// Reads the pair and aggregate sections of a rendered CSV report.
/// Comparison and audit sections are skipped.
pub fn parse_report_csv(text: &str) -> Result<Vec<CsvTable>, RenderError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Pairs,
        Aggregates,
        Other,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut tables: Vec<CsvTable> = Vec::new();
    let mut section = Section::None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| RenderError::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let fields: Vec<&str> = rec.iter().collect();
        let bad = |message: String| RenderError::Csv { line, message };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")));
        if fields == PAIR_HEADER {
            section = Section::Pairs;
            continue;
        }
        if fields == AGG_HEADER {
            section = Section::Aggregates;
            continue;
        }
        if fields == CMP_HEADER || fields == AUDIT_HEADER {
            section = Section::Other;
            continue;
        }
        match section {
            Section::Pairs => {
                let [label, serial, actual, predicted, mre] = fields[..] else {
                    return Err(bad("expected 5 fields".into()));
                };
                let serial = serial.parse().map_err(|_| bad(format!("bad serial `{serial}`")))?;
                let pair = (PredictionPair::new(serial, num(actual)?, num(predicted)?), num(mre)?);
                match tables.iter_mut().find(|t| t.label == label) {
                    Some(t) => t.pairs.push(pair),
                    None => tables.push(CsvTable {
                        label: label.to_string(),
                        pairs: vec![pair],
                        mmre_percent: f64::NAN,
                        pred25: f64::NAN,
                        mean_bre_percent: None,
                        n: 0,
                    }),
                }
            }
            Section::Aggregates => {
                let [label, mmre, pred, bre, n] = fields[..] else {
                    return Err(bad("expected 5 fields".into()));
                };
                let t = tables
                    .iter_mut()
                    .find(|t| t.label == label)
                    .ok_or_else(|| bad(format!("aggregate for unknown model `{label}`")))?;
                t.mmre_percent = num(mmre)?;
                t.pred25 = num(pred)?;
                t.mean_bre_percent = if bre.is_empty() { None } else { Some(num(bre)?) };
                t.n = n.parse().map_err(|_| bad(format!("bad count `{n}`")))?;
            }
            Section::Other => {}
            Section::None => return Err(bad("data before any header".into())),
        }
    }
    Ok(tables)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Bar chart of MMRE% per model, one `<rect class="bar">` per entry.
fn render_svg(c: &Comparison) -> String {
    let (bar_w, gap, left, top, plot_h) = (70.0, 30.0, 60.0, 40.0, 240.0);
    let max = c.chart.iter().map(|(_, v)| *v).fold(0.0f64, f64::max).max(1.0);
    let width = left + c.chart.len() as f64 * (bar_w + gap) + gap;
    let height = top + plot_h + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r#"  <text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        width / 2.0,
        escape(&c.title)
    );
    let base = top + plot_h;
    let _ = writeln!(
        s,
        r#"  <line x1="{left}" y1="{base}" x2="{width}" y2="{base}" stroke="black"/>"#
    );
    for (i, (label, v)) in c.chart.iter().enumerate() {
        let h = v / max * plot_h;
        let x = left + gap + i as f64 * (bar_w + gap);
        let y = base - h;
        let _ = writeln!(
            s,
            r##"  <rect class="bar" x="{x:.1}" y="{y:.1}" width="{bar_w}" height="{h:.1}" fill="#4c72b0"><title>{}: {v:.2}%</title></rect>"##,
            escape(label)
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{v:.2}</text>"#,
            x + bar_w / 2.0,
            y - 4.0
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            x + bar_w / 2.0,
            base + 16.0,
            escape(label)
        );
    }
    let _ = writeln!(
        s,
        r#"  <text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle" font-family="sans-serif" font-size="12">MMRE (%)</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    s.push_str("</svg>\n");
    s
}
