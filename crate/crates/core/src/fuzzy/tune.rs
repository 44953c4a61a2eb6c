//! Exhaustive grid search over FIS parameters, scored by full-dataset MMRE.
//!
//! Grid file format, one axis per line (`#` comments):
//!
//! ```text
//! bind TCOE tcoe                  # input variable <- record field
//! mf RDE Medium 1 68 70 72        # variable, term, parameter index (0-based), candidates
//! weight 3 0.5 1                  # rule number (1-based), candidates
//! consequent 1 Low Medium High    # rule number, candidate output labels
//! ```
//!
//! Grid points are enumerated odometer-style: the first axis varies
//! slowest, the last fastest. Point `i` is the i-th combination in that
//! order and ties on MMRE go to the lowest index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FisConfig, FuzzyError, Mamdani};
use crate::dataset::{Dataset, Feature};
use crate::metrics::{self, PredictionPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridAxis {
    MfParam {
        variable: String,
        term: String,
        index: usize,
        values: Vec<f64>,
    },
    RuleWeight {
        rule: usize,
        values: Vec<f64>,
    },
    Consequent {
        rule: usize,
        labels: Vec<String>,
    },
}

impl GridAxis {
    fn len(&self) -> usize {
        match self {
            GridAxis::MfParam { values, .. } | GridAxis::RuleWeight { values, .. } => values.len(),
            GridAxis::Consequent { labels, .. } => labels.len(),
        }
    }

    fn apply(&self, config: &mut FisConfig, choice: usize) -> Result<(), FuzzyError> {
        match self {
            GridAxis::MfParam {
                variable,
                term,
                index,
                values,
            } => {
                let var = config
                    .variable_mut(variable)
                    .ok_or_else(|| FuzzyError::UnknownVariable(variable.clone()))?;
                let var_name = var.name.clone();
                let t = var
                    .terms
                    .iter_mut()
                    .find(|t| &t.label == term)
                    .ok_or_else(|| FuzzyError::UnknownTerm {
                        variable: var_name,
                        label: term.clone(),
                    })?;
                t.mf.set_param(*index, values[choice])
                    .map_err(|reason| FuzzyError::InvalidMf {
                        label: term.clone(),
                        reason,
                    })
            }
            GridAxis::RuleWeight { rule, values } => {
                rule_mut(config, *rule)?.weight = values[choice];
                Ok(())
            }
            GridAxis::Consequent { rule, labels } => {
                rule_mut(config, *rule)?.consequent = labels[choice].clone();
                Ok(())
            }
        }
    }
}

fn rule_mut(config: &mut FisConfig, rule: usize) -> Result<&mut super::Rule, FuzzyError> {
    let count = config.rules.len();
    rule.checked_sub(1)
        .and_then(|i| config.rules.get_mut(i))
        .ok_or_else(|| FuzzyError::Grid(format!("rule {rule} does not exist (config has {count})")))
}

/// Input variable fed by a record field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputBinding {
    pub variable: String,
    pub feature: Feature,
}

impl InputBinding {
    /// Binds each input variable to the record field of the same name
    /// (case-insensitive).
    pub fn by_name(config: &FisConfig) -> Result<Vec<InputBinding>, FuzzyError> {
        ParamGrid::default().resolve_bindings(config)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub axes: Vec<GridAxis>,
    pub bindings: Vec<InputBinding>,
}

impl ParamGrid {
    pub fn point_count(&self) -> usize {
        self.axes.iter().map(GridAxis::len).product()
    }

    /// Per-axis choice indices of grid point `index`.
    pub fn choices(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = index % axis.len();
            index /= axis.len();
        }
        out
    }

    /// The template with grid point `index` applied and validated.
    pub fn config_at(&self, template: &FisConfig, index: usize) -> Result<FisConfig, FuzzyError> {
        let mut config = template.clone();
        let wrap = |e: FuzzyError| FuzzyError::GridPoint {
            index,
            source: Box::new(e),
        };
        for (axis, choice) in self.axes.iter().zip(self.choices(index)) {
            axis.apply(&mut config, choice).map_err(wrap)?;
        }
        config.validate().map_err(wrap)?;
        Ok(config)
    }

    /// Bindings for every input of `config`: `bind` lines first, remaining
    /// inputs matched to record fields by name.
    pub fn resolve_bindings(&self, config: &FisConfig) -> Result<Vec<InputBinding>, FuzzyError> {
        for b in &self.bindings {
            if config.input(&b.variable).is_none() {
                return Err(FuzzyError::Grid(format!("`bind` names unknown input `{}`", b.variable)));
            }
        }
        config
            .inputs
            .iter()
            .map(|v| match self.bindings.iter().find(|b| b.variable == v.name) {
                Some(b) => Ok(b.clone()),
                None => Feature::parse(&v.name)
                    .map(|feature| InputBinding {
                        variable: v.name.clone(),
                        feature,
                    })
                    .ok_or_else(|| {
                        FuzzyError::Grid(format!(
                            "no record field named like input `{}`; add a `bind` line",
                            v.name
                        ))
                    }),
            })
            .collect()
    }
}

pub fn parse_grid(text: &str) -> Result<ParamGrid, FuzzyError> {
    let mut grid = ParamGrid::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&keyword) = tokens.first() else {
            continue;
        };
        let err = |m: String| FuzzyError::Parse {
            line,
            column: 1,
            message: m,
        };
        let numbers = |from: usize| -> Result<Vec<f64>, FuzzyError> {
            let vals = tokens[from.min(tokens.len())..]
                .iter()
                .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(*t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|t| err(format!("`{t}` is not a number")))?;
            if vals.is_empty() {
                return Err(err("axis needs at least one candidate".into()));
            }
            Ok(vals)
        };
        let rule_number = |i: usize| -> Result<usize, FuzzyError> {
            tokens
                .get(i)
                .and_then(|t| t.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| err("expected a rule number >= 1".into()))
        };
        match keyword {
            "bind" => {
                if tokens.len() != 3 {
                    return Err(err("expected `bind <Variable> <field>`".into()));
                }
                let feature =
                    Feature::parse(tokens[2]).ok_or_else(|| err(format!("unknown record field `{}`", tokens[2])))?;
                grid.bindings.push(InputBinding {
                    variable: tokens[1].to_string(),
                    feature,
                });
            }
            "mf" => {
                if tokens.len() < 5 {
                    return Err(err("expected `mf <Variable> <Term> <index> <values...>`".into()));
                }
                let index = tokens[3]
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{}` is not a parameter index", tokens[3])))?;
                grid.axes.push(GridAxis::MfParam {
                    variable: tokens[1].to_string(),
                    term: tokens[2].to_string(),
                    index,
                    values: numbers(4)?,
                });
            }
            "weight" => grid.axes.push(GridAxis::RuleWeight {
                rule: rule_number(1)?,
                values: numbers(2)?,
            }),
            "consequent" => {
                if tokens.len() < 3 {
                    return Err(err("axis needs at least one candidate".into()));
                }
                grid.axes.push(GridAxis::Consequent {
                    rule: rule_number(1)?,
                    labels: tokens[2..].iter().map(|s| s.to_string()).collect(),
                });
            }
            other => return Err(err(format!("unknown grid keyword `{other}`"))),
        }
    }
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub mmre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub best: FisConfig,
    pub best_index: usize,
    pub best_mmre: f64,
    pub trace: Vec<TraceEntry>,
}

/// Predicts every record with `config` and scores the predictions.
pub fn evaluate_config(
    config: &FisConfig,
    data: &Dataset,
    bindings: &[InputBinding],
) -> Result<Vec<PredictionPair>, FuzzyError> {
    let engine = Mamdani::new(config)?;
    data.records()
        .iter()
        .map(|r| {
            let inputs: Vec<(&str, f64)> = bindings
                .iter()
                .map(|b| (b.variable.as_str(), r.feature(b.feature)))
                .collect();
            let out = engine.infer(&inputs)?;
            Ok(PredictionPair::new(r.serial, r.rde, out.output))
        })
        .collect()
}

fn score(config: &FisConfig, data: &Dataset, bindings: &[InputBinding]) -> Result<f64, FuzzyError> {
    let pairs = evaluate_config(config, data, bindings)?;
    metrics::mmre(&pairs).map_err(|e| FuzzyError::Invalid(e.to_string()))
}

/// Scores every grid point and returns the lowest-MMRE configuration.
///
/// Points are evaluated in parallel; the winner is chosen by a sequential
/// scan in enumeration order, so the result does not depend on scheduling.
pub fn tune_fis(template: &FisConfig, grid: &ParamGrid, data: &Dataset) -> Result<TuneOutcome, FuzzyError> {
    if grid.axes.is_empty() || grid.point_count() == 0 {
        return Err(FuzzyError::Grid("grid has no points".into()));
    }
    if data.is_empty() {
        return Err(FuzzyError::Grid("no records to score against".into()));
    }
    template.validate()?;
    let bindings = grid.resolve_bindings(template)?;

    let scored: Vec<Result<f64, FuzzyError>> = (0..grid.point_count())
        .into_par_iter()
        .map(|index| {
            let config = grid.config_at(template, index)?;
            score(&config, data, &bindings).map_err(|e| FuzzyError::GridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect();

    let mut trace = Vec::with_capacity(scored.len());
    let mut best: Option<(usize, f64)> = None;
    for (index, result) in scored.into_iter().enumerate() {
        let mmre = result?;
        trace.push(TraceEntry { index, mmre });
        if best.is_none_or(|(_, b)| mmre < b) {
            best = Some((index, mmre));
        }
    }
    let (best_index, best_mmre) = best.expect("non-empty grid");
    Ok(TuneOutcome {
        best: grid.config_at(template, best_index)?,
        best_index,
        best_mmre,
        trace,
    })
}
