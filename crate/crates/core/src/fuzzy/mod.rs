//! Mamdani fuzzy inference built from first principles.
//!
//! The inference stack is the classical one: min t-norm, max s-norm,
//! min (clip) implication, max aggregation over a sampled output universe
//! and centroid defuzzification. Configurations are read from and written
//! to a small line-oriented text format (see [`format`]).

mod format;
mod inference;
mod tune;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{parse_fis, serialize_fis};
pub use inference::{defuzzify_centroid, membership_degree, rule_strength, Diagnostics, Inference, Mamdani};
pub use tune::{evaluate_config, parse_grid, tune_fis, GridAxis, InputBinding, ParamGrid, TraceEntry, TuneOutcome};

/// Smallest accepted output sampling resolution.
pub const MIN_RESOLUTION: usize = 101;
/// Resolution used when a config does not set one.
pub const DEFAULT_RESOLUTION: usize = 1001;

/// Shipped template for the two-input (TCOE, CGPA) effort FIS.
pub const DEFAULT_FIS: &str = include_str!("../../assets/default.fis");
/// Shipped tuning grid for [`DEFAULT_FIS`].
pub const DEFAULT_GRID: &str = include_str!("../../assets/default.grid");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("membership function `{label}`: {reason}")]
    InvalidMf { label: String, reason: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no term `{label}`")]
    UnknownTerm { variable: String, label: String },
    #[error("missing crisp input for variable `{0}`")]
    MissingInput(String),
    #[error("aggregated output set is empty")]
    EmptyAggregate,
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid point {index}: {source}")]
    GridPoint {
        index: usize,
        #[source]
        source: Box<FuzzyError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
    Gaussian { mean: f64, sigma: f64 },
}

impl MembershipFunction {
    pub fn validate(&self) -> Result<(), String> {
        let params = self.params();
        if params.iter().any(|p| !p.is_finite()) {
            return Err("parameters must be finite".into());
        }
        match *self {
            MembershipFunction::Triangular { a, b, c } => {
                if !(a <= b && b <= c) {
                    return Err(format!("triangle needs a <= b <= c (got {a} {b} {c})"));
                }
                if !(a < c) {
                    return Err(format!("triangle needs a < c (got {a} {c})"));
                }
            }
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                if !(a <= b && b <= c && c <= d) {
                    return Err(format!("trapezoid needs a <= b <= c <= d (got {a} {b} {c} {d})"));
                }
                if !(a < d) {
                    return Err(format!("trapezoid needs a < d (got {a} {d})"));
                }
            }
            MembershipFunction::Gaussian { sigma, .. } => {
                if !(sigma > 0.0) {
                    return Err(format!("gaussian needs sigma > 0 (got {sigma})"));
                }
            }
        }
        Ok(())
    }

    /// Parameters in declaration order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            MembershipFunction::Triangular { a, b, c } => vec![a, b, c],
            MembershipFunction::Trapezoidal { a, b, c, d } => vec![a, b, c, d],
            MembershipFunction::Gaussian { mean, sigma } => vec![mean, sigma],
        }
    }

    pub fn set_param(&mut self, index: usize, value: f64) -> Result<(), String> {
        let slot = match (self, index) {
            (MembershipFunction::Triangular { a, .. }, 0) => a,
            (MembershipFunction::Triangular { b, .. }, 1) => b,
            (MembershipFunction::Triangular { c, .. }, 2) => c,
            (MembershipFunction::Trapezoidal { a, .. }, 0) => a,
            (MembershipFunction::Trapezoidal { b, .. }, 1) => b,
            (MembershipFunction::Trapezoidal { c, .. }, 2) => c,
            (MembershipFunction::Trapezoidal { d, .. }, 3) => d,
            (MembershipFunction::Gaussian { mean, .. }, 0) => mean,
            (MembershipFunction::Gaussian { sigma, .. }, 1) => sigma,
            (mf, i) => return Err(format!("{} has no parameter {i}", mf.keyword())),
        };
        *slot = value;
        Ok(())
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            MembershipFunction::Triangular { .. } => "tri",
            MembershipFunction::Trapezoidal { .. } => "trap",
            MembershipFunction::Gaussian { .. } => "gauss",
        }
    }

    /// Closed interval outside of which the degree is zero.
    fn support(&self) -> (f64, f64) {
        match *self {
            MembershipFunction::Triangular { a, c, .. } => (a, c),
            MembershipFunction::Trapezoidal { a, d, .. } => (a, d),
            MembershipFunction::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub mf: MembershipFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<Term>,
}

impl LinguisticVariable {
    pub fn term(&self, label: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.label == label)
    }

    pub fn term_index(&self, label: &str) -> Result<usize, FuzzyError> {
        self.terms
            .iter()
            .position(|t| t.label == label)
            .ok_or_else(|| FuzzyError::UnknownTerm {
                variable: self.name.clone(),
                label: label.to_string(),
            })
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn validate(&self) -> Result<(), FuzzyError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(FuzzyError::Invalid(format!(
                "variable `{}` needs a range lo < hi (got {} {})",
                self.name, self.lo, self.hi
            )));
        }
        if self.terms.is_empty() {
            return Err(FuzzyError::Invalid(format!("variable `{}` has no terms", self.name)));
        }
        let mut labels = HashSet::new();
        for t in &self.terms {
            if !labels.insert(t.label.as_str()) {
                return Err(FuzzyError::Invalid(format!(
                    "variable `{}` repeats term `{}`",
                    self.name, t.label
                )));
            }
            t.mf.validate().map_err(|reason| FuzzyError::InvalidMf {
                label: t.label.clone(),
                reason,
            })?;
            let (s_lo, s_hi) = t.mf.support();
            if s_hi < self.lo || s_lo > self.hi {
                return Err(FuzzyError::InvalidMf {
                    label: t.label.clone(),
                    reason: format!(
                        "support does not intersect the universe [{}, {}] of `{}`",
                        self.lo, self.hi, self.name
                    ),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connective {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub variable: String,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: Vec<Clause>,
    pub connective: Connective,
    /// Output term label.
    pub consequent: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisConfig {
    pub name: String,
    pub inputs: Vec<LinguisticVariable>,
    pub output: LinguisticVariable,
    pub rules: Vec<Rule>,
    pub resolution: usize,
}

impl FisConfig {
    pub fn input(&self, name: &str) -> Option<&LinguisticVariable> {
        self.inputs.iter().find(|v| v.name == name)
    }

    pub fn variable_mut(&mut self, name: &str) -> Option<&mut LinguisticVariable> {
        if self.output.name == name {
            return Some(&mut self.output);
        }
        self.inputs.iter_mut().find(|v| v.name == name)
    }

    pub fn validate(&self) -> Result<(), FuzzyError> {
        if self.resolution < MIN_RESOLUTION {
            return Err(FuzzyError::Invalid(format!(
                "resolution must be >= {MIN_RESOLUTION} (got {})",
                self.resolution
            )));
        }
        if self.inputs.is_empty() {
            return Err(FuzzyError::Invalid("at least one input variable is required".into()));
        }
        if self.rules.is_empty() {
            return Err(FuzzyError::Invalid("at least one rule is required".into()));
        }
        let mut names = HashSet::new();
        for v in self.inputs.iter().chain(std::iter::once(&self.output)) {
            if !names.insert(v.name.as_str()) {
                return Err(FuzzyError::Invalid(format!("variable `{}` declared twice", v.name)));
            }
            v.validate()?;
        }
        for (i, rule) in self.rules.iter().enumerate() {
            self.validate_rule(rule).map_err(|e| match e {
                FuzzyError::Invalid(m) => FuzzyError::Invalid(format!("rule {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    fn validate_rule(&self, rule: &Rule) -> Result<(), FuzzyError> {
        if rule.antecedent.is_empty() {
            return Err(FuzzyError::Invalid("empty antecedent".into()));
        }
        if !(rule.weight > 0.0 && rule.weight <= 1.0) {
            return Err(FuzzyError::Invalid(format!(
                "weight must lie in (0, 1] (got {})",
                rule.weight
            )));
        }
        for clause in &rule.antecedent {
            let var = self
                .input(&clause.variable)
                .ok_or_else(|| FuzzyError::UnknownVariable(clause.variable.clone()))?;
            var.term_index(&clause.term)?;
        }
        self.output.term_index(&rule.consequent)?;
        Ok(())
    }

    /// Runs one inference. Compiles the configuration on every call; use
    /// [`Mamdani`] directly to amortise that across many inputs.
    pub fn infer(&self, inputs: &[(&str, f64)]) -> Result<Inference, FuzzyError> {
        Mamdani::new(self)?.infer(inputs)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn tri(a: f64, b: f64, c: f64) -> MembershipFunction {
        MembershipFunction::Triangular { a, b, c }
    }

    pub fn var(name: &str, lo: f64, hi: f64, terms: &[(&str, MembershipFunction)]) -> LinguisticVariable {
        LinguisticVariable {
            name: name.into(),
            lo,
            hi,
            terms: terms
                .iter()
                .map(|(l, mf)| Term {
                    label: l.to_string(),
                    mf: *mf,
                })
                .collect(),
        }
    }

    pub fn rule(clauses: &[(&str, &str)], connective: Connective, out: &str, weight: f64) -> Rule {
        Rule {
            antecedent: clauses
                .iter()
                .map(|(v, t)| Clause {
                    variable: v.to_string(),
                    term: t.to_string(),
                })
                .collect(),
            connective,
            consequent: out.into(),
            weight,
        }
    }

    /// Two inputs on the dataset's TCOE/CGPA ranges, output RDE on [55, 80].
    pub fn small_config() -> FisConfig {
        FisConfig {
            name: "small".into(),
            inputs: vec![
                var(
                    "TCOE",
                    4.0,
                    24.0,
                    &[("Low", tri(4.0, 4.0, 14.0)), ("High", tri(4.0, 24.0, 24.0))],
                ),
                var(
                    "CGPA",
                    5.0,
                    10.0,
                    &[("Low", tri(5.0, 5.0, 10.0)), ("High", tri(5.0, 10.0, 10.0))],
                ),
            ],
            output: var(
                "RDE",
                55.0,
                80.0,
                &[
                    ("Low", tri(55.0, 60.0, 65.0)),
                    ("Mid", tri(60.0, 70.0, 80.0)),
                    ("High", tri(75.0, 80.0, 85.0)),
                ],
            ),
            rules: vec![
                rule(&[("TCOE", "Low"), ("CGPA", "High")], Connective::And, "Low", 1.0),
                rule(&[("TCOE", "High")], Connective::And, "High", 1.0),
                rule(&[("TCOE", "Low"), ("CGPA", "Low")], Connective::Or, "Mid", 0.5),
            ],
            resolution: DEFAULT_RESOLUTION,
        }
    }
}
