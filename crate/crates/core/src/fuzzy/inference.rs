use serde::{Deserialize, Serialize};

use super::{Connective, FisConfig, FuzzyError, MembershipFunction, Rule};

/// Degree of membership of `x`, always in `[0, 1]`.
pub fn membership_degree(mf: &MembershipFunction, x: f64) -> f64 {
    match *mf {
        MembershipFunction::Triangular { a, b, c } => ramp_up(x, a, b).min(ramp_down(x, b, c)),
        MembershipFunction::Trapezoidal { a, b, c, d } => ramp_up(x, a, b).min(ramp_down(x, c, d)),
        MembershipFunction::Gaussian { mean, sigma } => {
            let z = (x - mean) / sigma;
            (-0.5 * z * z).exp()
        }
    }
}

// 0 below `lo`, 1 from `hi` on, linear between. A vertical edge (lo == hi) is 1 at lo.
fn ramp_up(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        0.0
    } else if x >= hi {
        1.0
    } else {
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

fn ramp_down(x: f64, lo: f64, hi: f64) -> f64 {
    if x > hi {
        0.0
    } else if x <= lo {
        1.0
    } else {
        ((hi - x) / (hi - lo)).clamp(0.0, 1.0)
    }
}

fn combine(connective: Connective, degrees: impl Iterator<Item = f64>) -> f64 {
    match connective {
        Connective::And => degrees.fold(1.0, f64::min),
        Connective::Or => degrees.fold(0.0, f64::max),
    }
}

/// Firing strength of `rule`: weight times the min (AND) or max (OR) of the
/// antecedent degrees. Inputs are used as given, without clamping.
pub fn rule_strength(config: &FisConfig, rule: &Rule, inputs: &[(&str, f64)]) -> Result<f64, FuzzyError> {
    let mut degrees = Vec::with_capacity(rule.antecedent.len());
    for clause in &rule.antecedent {
        let var = config
            .input(&clause.variable)
            .ok_or_else(|| FuzzyError::UnknownVariable(clause.variable.clone()))?;
        let term = var.term(&clause.term).ok_or_else(|| FuzzyError::UnknownTerm {
            variable: var.name.clone(),
            label: clause.term.clone(),
        })?;
        let x = lookup(inputs, &clause.variable)?;
        degrees.push(membership_degree(&term.mf, x));
    }
    Ok(rule.weight * combine(rule.connective, degrees.into_iter()))
}

fn lookup(inputs: &[(&str, f64)], name: &str) -> Result<f64, FuzzyError> {
    inputs
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| FuzzyError::MissingInput(name.to_string()))
}

/// Centroid `sum(x * mu) / sum(mu)` of a sampled fuzzy set.
///
/// Returns [`FuzzyError::EmptyAggregate`] when the set has no mass.
pub fn defuzzify_centroid(xs: &[f64], mus: &[f64]) -> Result<f64, FuzzyError> {
    if xs.len() != mus.len() {
        return Err(FuzzyError::Invalid(format!(
            "{} abscissae but {} membership values",
            xs.len(),
            mus.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(FuzzyError::Invalid("abscissae must be strictly increasing".into()));
    }
    if mus.iter().any(|m| !(*m >= 0.0)) {
        return Err(FuzzyError::Invalid("membership values must be >= 0".into()));
    }
    let (num, den) = xs.iter().zip(mus).fold((0.0, 0.0), |(n, d), (x, m)| (n + x * m, d + m));
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(FuzzyError::EmptyAggregate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `(variable, given, used)` for every input moved onto its universe.
    pub clamped: Vec<(String, f64, f64)>,
    /// Firing strength per rule, in rule order.
    pub strengths: Vec<f64>,
    /// No rule fired (or the aggregate had no mass); the output is the
    /// universe midpoint.
    pub no_rule_fired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inference {
    pub output: f64,
    pub diagnostics: Diagnostics,
}

struct CompiledRule {
    clauses: Vec<(usize, usize)>,
    connective: Connective,
    consequent: usize,
    weight: f64,
}

/// A validated configuration with resolved references and the output
/// universe pre-sampled.
pub struct Mamdani<'a> {
    config: &'a FisConfig,
    rules: Vec<CompiledRule>,
    xs: Vec<f64>,
    // curves[t][k]: degree of output term t at xs[k]
    curves: Vec<Vec<f64>>,
}

impl<'a> Mamdani<'a> {
    pub fn new(config: &'a FisConfig) -> Result<Self, FuzzyError> {
        config.validate()?;
        let rules = config
            .rules
            .iter()
            .map(|r| {
                let clauses = r
                    .antecedent
                    .iter()
                    .map(|c| {
                        let vi = config
                            .inputs
                            .iter()
                            .position(|v| v.name == c.variable)
                            .ok_or_else(|| FuzzyError::UnknownVariable(c.variable.clone()))?;
                        Ok((vi, config.inputs[vi].term_index(&c.term)?))
                    })
                    .collect::<Result<Vec<_>, FuzzyError>>()?;
                Ok(CompiledRule {
                    clauses,
                    connective: r.connective,
                    consequent: config.output.term_index(&r.consequent)?,
                    weight: r.weight,
                })
            })
            .collect::<Result<Vec<_>, FuzzyError>>()?;
        let out = &config.output;
        let n = config.resolution;
        let step = (out.hi - out.lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n)
            .map(|k| if k == n - 1 { out.hi } else { out.lo + k as f64 * step })
            .collect();
        let curves = out
            .terms
            .iter()
            .map(|t| xs.iter().map(|&x| membership_degree(&t.mf, x)).collect())
            .collect();
        Ok(Mamdani {
            config,
            rules,
            xs,
            curves,
        })
    }

    pub fn config(&self) -> &FisConfig {
        self.config
    }

    /// Spacing of the output sample grid.
    pub fn grid_step(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn infer(&self, inputs: &[(&str, f64)]) -> Result<Inference, FuzzyError> {
        for (name, _) in inputs {
            if self.config.input(name).is_none() {
                return Err(FuzzyError::UnknownVariable(name.to_string()));
            }
        }
        let mut clamped = Vec::new();
        let mut crisp = Vec::with_capacity(self.config.inputs.len());
        for var in &self.config.inputs {
            let given = lookup(inputs, &var.name)?;
            let used = var.clamp(given);
            if used != given {
                clamped.push((var.name.clone(), given, used));
            }
            crisp.push(used);
        }

        let strengths: Vec<f64> = self
            .rules
            .iter()
            .map(|r| {
                let degrees = r
                    .clauses
                    .iter()
                    .map(|&(vi, ti)| membership_degree(&self.config.inputs[vi].terms[ti].mf, crisp[vi]));
                r.weight * combine(r.connective, degrees)
            })
            .collect();

        let mut aggregate = vec![0.0f64; self.xs.len()];
        for (rule, &s) in self.rules.iter().zip(&strengths) {
            if s <= 0.0 {
                continue;
            }
            for (agg, &mu) in aggregate.iter_mut().zip(&self.curves[rule.consequent]) {
                *agg = agg.max(mu.min(s));
            }
        }

        let (output, no_rule_fired) = match defuzzify_centroid(&self.xs, &aggregate) {
            Ok(x) => (x.clamp(self.config.output.lo, self.config.output.hi), false),
            Err(FuzzyError::EmptyAggregate) => (self.config.output.midpoint(), true),
            Err(e) => return Err(e),
        };
        Ok(Inference {
            output,
            diagnostics: Diagnostics {
                clamped,
                strengths,
                no_rule_fired,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{Connective, FisConfig, DEFAULT_RESOLUTION};
    use super::*;

    #[test]
    fn triangular_degrees() {
        let mf = tri(4.0, 14.0, 24.0);
        assert_eq!(membership_degree(&mf, 14.0), 1.0);
        assert_eq!(membership_degree(&mf, 9.0), 0.5);
        assert_eq!(membership_degree(&mf, 30.0), 0.0);
        assert_eq!(membership_degree(&mf, 4.0), 0.0);
        assert_eq!(membership_degree(&mf, 19.0), 0.5);
        // shoulders
        assert_eq!(membership_degree(&tri(4.0, 4.0, 14.0), 4.0), 1.0);
        assert_eq!(membership_degree(&tri(4.0, 24.0, 24.0), 24.0), 1.0);
    }

    #[test]
    fn trapezoid_and_gaussian_degrees() {
        let mf = MembershipFunction::Trapezoidal {
            a: 0.0,
            b: 2.0,
            c: 4.0,
            d: 8.0,
        };
        assert_eq!(membership_degree(&mf, 1.0), 0.5);
        assert_eq!(membership_degree(&mf, 3.0), 1.0);
        assert_eq!(membership_degree(&mf, 6.0), 0.5);
        assert_eq!(membership_degree(&mf, 9.0), 0.0);
        let g = MembershipFunction::Gaussian { mean: 70.0, sigma: 2.0 };
        assert_eq!(membership_degree(&g, 70.0), 1.0);
        assert!((membership_degree(&g, 72.0) - (-0.5f64).exp()).abs() < 1e-15);
    }

    fn strength_config() -> FisConfig {
        // TCOE: A has degree 0.3 at x=3, CGPA: B has degree 0.8 at x=8
        FisConfig {
            name: "s".into(),
            inputs: vec![
                var("X", 0.0, 10.0, &[("A", tri(0.0, 10.0, 10.0))]),
                var(
                    "Y",
                    0.0,
                    10.0,
                    &[("B", tri(0.0, 10.0, 10.0)), ("C", tri(0.0, 10.0, 10.0))],
                ),
            ],
            output: var("Z", 0.0, 1.0, &[("O", tri(0.0, 0.5, 1.0))]),
            rules: vec![rule(&[("X", "A"), ("Y", "B")], Connective::And, "O", 1.0)],
            resolution: DEFAULT_RESOLUTION,
        }
    }

    #[test]
    fn rule_strength_examples() {
        let c = strength_config();
        let inputs = [("X", 3.0), ("Y", 8.0)];
        let and = rule(&[("X", "A"), ("Y", "B")], Connective::And, "O", 1.0);
        assert!((rule_strength(&c, &and, &inputs).unwrap() - 0.3).abs() < 1e-15);
        let or = rule(&[("X", "A"), ("Y", "B")], Connective::Or, "O", 1.0);
        assert!((rule_strength(&c, &or, &inputs).unwrap() - 0.8).abs() < 1e-15);
        let weighted = rule(&[("X", "A"), ("Y", "C")], Connective::And, "O", 0.5);
        let s = rule_strength(&c, &weighted, &[("X", 8.0), ("Y", 10.0)]).unwrap();
        assert!((s - 0.4).abs() < 1e-15);
        assert_eq!(
            rule_strength(&c, &and, &[("X", 3.0)]),
            Err(FuzzyError::MissingInput("Y".into()))
        );
    }

    #[test]
    fn centroid_examples() {
        let xs: Vec<f64> = (0..=100).map(|k| k as f64 * 0.1).collect();
        let ones = vec![1.0; xs.len()];
        assert!((defuzzify_centroid(&xs, &ones).unwrap() - 5.0).abs() <= 0.05);
        let xs2 = [7.0, 7.25, 7.5];
        assert_eq!(defuzzify_centroid(&xs2, &[0.0, 0.6, 0.0]).unwrap(), 7.25);
        assert_eq!(defuzzify_centroid(&xs2, &[0.0; 3]), Err(FuzzyError::EmptyAggregate));
        assert!(defuzzify_centroid(&[1.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(defuzzify_centroid(&[1.0, 2.0], &[1.0]).is_err());
    }

    fn rde_config(rules: Vec<super::super::Rule>) -> FisConfig {
        FisConfig {
            name: "rde".into(),
            inputs: vec![var(
                "X",
                0.0,
                1.0,
                &[("A", tri(0.0, 0.0, 0.5)), ("B", tri(0.5, 1.0, 1.0))],
            )],
            output: var(
                "RDE",
                55.0,
                80.0,
                &[
                    ("Mid", tri(62.0, 70.0, 78.0)),
                    ("L", tri(60.0, 65.0, 69.0)),
                    ("R", tri(71.0, 75.0, 80.0)),
                ],
            ),
            rules,
            resolution: DEFAULT_RESOLUTION,
        }
    }

    #[test]
    fn symmetric_consequent() {
        let c = rde_config(vec![rule(&[("X", "A")], Connective::And, "Mid", 1.0)]);
        let m = Mamdani::new(&c).unwrap();
        let out = m.infer(&[("X", 0.0)]).unwrap();
        assert!((out.output - 70.0).abs() <= m.grid_step());
        assert!(!out.diagnostics.no_rule_fired);
    }

    #[test]
    fn no_rule_fired_falls_back_to_midpoint() {
        let c = rde_config(vec![rule(&[("X", "A")], Connective::And, "Mid", 1.0)]);
        let out = c.infer(&[("X", 0.9)]).unwrap();
        assert_eq!(out.output, 67.5);
        assert!(out.diagnostics.no_rule_fired);
    }

    #[test]
    fn mirrored_consequents_balance() {
        // L and R are mirror images about 70; A and B fire equally everywhere.
        let mut c = rde_config(vec![
            rule(&[("X", "A")], Connective::And, "L", 1.0),
            rule(&[("X", "B")], Connective::And, "R", 1.0),
        ]);
        c.inputs[0].terms = vec![
            super::super::Term {
                label: "A".into(),
                mf: tri(0.0, 0.5, 1.0),
            },
            super::super::Term {
                label: "B".into(),
                mf: tri(0.0, 0.5, 1.0),
            },
        ];
        let m = Mamdani::new(&c).unwrap();
        let out = m.infer(&[("X", 0.3)]).unwrap();
        assert!((out.output - 70.0).abs() <= m.grid_step(), "{}", out.output);
    }

    #[test]
    fn inputs_are_clamped_and_checked() {
        let c = rde_config(vec![rule(&[("X", "A")], Connective::And, "Mid", 1.0)]);
        let out = c.infer(&[("X", -3.0)]).unwrap();
        assert_eq!(out.diagnostics.clamped, vec![("X".to_string(), -3.0, 0.0)]);
        assert!((out.output - 70.0).abs() <= 0.025);
        assert_eq!(
            c.infer(&[("X", 0.0), ("Q", 1.0)]),
            Err(FuzzyError::UnknownVariable("Q".into()))
        );
        assert_eq!(c.infer(&[]), Err(FuzzyError::MissingInput("X".into())));
    }
}
