//! Early-stage software effort estimation toolkit.
//!
//! - [`dataset`]: the embedded 41-record ERD student dataset, CSV loading,
//!   the 31/11 train/test split and min-max scaling.
//! - [`fuzzy`]: a Mamdani fuzzy inference engine with a text config format
//!   and a grid-search tuner.
//! - [`neural`]: feedforward, cascade-forward, Elman and layer-recurrent
//!   regressors trained by online backpropagation, plus GRNN.
//! - [`metrics`]: MRE, MMRE, Pred(q) and BRE.
//! - [`replay`]: recorded prediction tables, recomputed aggregates, audit
//!   notes and model comparison.
//! - [`render`]: text, CSV, JSON and SVG output.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod fuzzy;
pub mod metrics;
pub mod neural;
pub mod render;
pub mod replay;

pub use dataset::{builtin_dataset, load_dataset, recorded_split, Dataset, ProjectRecord};
pub use metrics::{evaluate, EvaluationReport, PredictionPair};
pub use render::{render_dataset, render_report, Format, ReportBundle};
