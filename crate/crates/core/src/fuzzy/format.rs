//! Line-oriented FIS text format.
//!
//! ```text
//! fis "effort"
//! resolution 1001
//! input TCOE range 4 24
//!   mf Small trap 4 4 6 10
//! output RDE range 55 80
//!   mf Medium tri 62.5 70 77.5
//! rule TCOE=Small & CGPA=High => RDE=Medium weight 0.5
//! ```
//!
//! `#` starts a comment. `mf` lines belong to the closest preceding
//! `input`/`output`. Rules use `&` (AND) or `|` (OR), never both, and
//! `weight` defaults to 1. Numbers are written with the shortest decimal
//! representation that round-trips.

use std::fmt::Write as _;

use super::{
    Clause, Connective, FisConfig, FuzzyError, LinguisticVariable, MembershipFunction, Rule, Term, DEFAULT_RESOLUTION,
};

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, token: usize, message: impl Into<String>) -> FuzzyError {
        let column = self.tokens.get(token).or(self.tokens.last()).map_or(1, |t| t.column);
        FuzzyError::Parse {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn text(&self, i: usize, what: &str) -> Result<&'a str, FuzzyError> {
        self.tokens
            .get(i)
            .map(|t| t.text)
            .ok_or_else(|| self.err(i, format!("expected {what}")))
    }

    fn number(&self, i: usize, what: &str) -> Result<f64, FuzzyError> {
        let raw = self.text(i, what)?;
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(i, format!("expected {what}, found `{raw}`")))
    }

    fn expect_len(&self, n: usize) -> Result<(), FuzzyError> {
        if self.tokens.len() > n {
            Err(self.err(n, format!("unexpected `{}`", self.tokens[n].text)))
        } else if self.tokens.len() < n {
            Err(self.err(self.tokens.len(), "line ends early"))
        } else {
            Ok(())
        }
    }
}

fn tokenize(number: usize, raw: &str) -> Result<Line<'_>, FuzzyError> {
    let mut tokens = Vec::new();
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'#' => break,
            c if c.is_ascii_whitespace() => i += 1,
            b'"' => {
                let start = i;
                let end = raw[i + 1..].find('"').ok_or(FuzzyError::Parse {
                    line: number,
                    column: start + 1,
                    message: "unterminated string".into(),
                })?;
                i = start + end + 2;
                tokens.push(Token {
                    text: &raw[start..i],
                    column: start + 1,
                });
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'#' {
                    i += 1;
                }
                tokens.push(Token {
                    text: &raw[start..i],
                    column: start + 1,
                });
            }
        }
    }
    Ok(Line { number, tokens })
}

fn identifier<'a>(line: &Line<'a>, i: usize, what: &str) -> Result<&'a str, FuzzyError> {
    let s = line.text(i, what)?;
    let ok = s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
    if ok {
        Ok(s)
    } else {
        Err(line.err(i, format!("`{s}` is not a valid {what}")))
    }
}

enum Current {
    None,
    Input(usize),
    Output,
}

/// Parses the FIS text format, then validates the whole configuration.
pub fn parse_fis(text: &str) -> Result<FisConfig, FuzzyError> {
    let mut name: Option<String> = None;
    let mut resolution = DEFAULT_RESOLUTION;
    let mut inputs: Vec<LinguisticVariable> = Vec::new();
    let mut output: Option<LinguisticVariable> = None;
    let mut rules: Vec<(Rule, usize)> = Vec::new();
    let mut current = Current::None;

    for (idx, raw) in text.lines().enumerate() {
        let line = tokenize(idx + 1, raw)?;
        let Some(keyword) = line.tokens.first().map(|t| t.text) else {
            continue;
        };
        match keyword {
            "fis" => {
                line.expect_len(2)?;
                let quoted = line.text(1, "quoted name")?;
                if quoted.len() < 2 || !quoted.starts_with('"') {
                    return Err(line.err(1, "name must be quoted"));
                }
                name = Some(quoted[1..quoted.len() - 1].to_string());
            }
            "resolution" => {
                line.expect_len(2)?;
                let n = line.number(1, "sample count")?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(line.err(1, "resolution must be a whole number"));
                }
                if (n as usize) < super::MIN_RESOLUTION {
                    return Err(line.err(1, format!("resolution must be >= {}", super::MIN_RESOLUTION)));
                }
                resolution = n as usize;
            }
            "input" | "output" => {
                line.expect_len(5)?;
                let var_name = identifier(&line, 1, "variable name")?;
                if line.text(2, "`range`")? != "range" {
                    return Err(line.err(2, "expected `range`"));
                }
                let lo = line.number(3, "range lower bound")?;
                let hi = line.number(4, "range upper bound")?;
                if !(lo < hi) {
                    return Err(line.err(4, "range needs lo < hi"));
                }
                let exists =
                    inputs.iter().any(|v| v.name == var_name) || output.as_ref().is_some_and(|v| v.name == var_name);
                if exists {
                    return Err(line.err(1, format!("variable `{var_name}` declared twice")));
                }
                let var = LinguisticVariable {
                    name: var_name.to_string(),
                    lo,
                    hi,
                    terms: Vec::new(),
                };
                if keyword == "input" {
                    inputs.push(var);
                    current = Current::Input(inputs.len() - 1);
                } else {
                    if output.is_some() {
                        return Err(line.err(0, "only one output variable is allowed"));
                    }
                    output = Some(var);
                    current = Current::Output;
                }
            }
            "mf" => {
                let label = identifier(&line, 1, "term label")?;
                let kind = line.text(2, "membership function kind")?;
                let mf = match kind {
                    "tri" => {
                        line.expect_len(6)?;
                        MembershipFunction::Triangular {
                            a: line.number(3, "parameter a")?,
                            b: line.number(4, "parameter b")?,
                            c: line.number(5, "parameter c")?,
                        }
                    }
                    "trap" => {
                        line.expect_len(7)?;
                        MembershipFunction::Trapezoidal {
                            a: line.number(3, "parameter a")?,
                            b: line.number(4, "parameter b")?,
                            c: line.number(5, "parameter c")?,
                            d: line.number(6, "parameter d")?,
                        }
                    }
                    "gauss" => {
                        line.expect_len(5)?;
                        MembershipFunction::Gaussian {
                            mean: line.number(3, "mean")?,
                            sigma: line.number(4, "sigma")?,
                        }
                    }
                    other => return Err(line.err(2, format!("unknown membership function kind `{other}`"))),
                };
                mf.validate().map_err(|reason| line.err(3, reason))?;
                let var = match current {
                    Current::Input(i) => &mut inputs[i],
                    Current::Output => output.as_mut().expect("output set"),
                    Current::None => return Err(line.err(0, "`mf` before any `input` or `output`")),
                };
                if var.term(label).is_some() {
                    return Err(line.err(1, format!("term `{label}` declared twice for `{}`", var.name)));
                }
                var.terms.push(Term {
                    label: label.to_string(),
                    mf,
                });
            }
            "rule" => rules.push((parse_rule(&line)?, line.number)),
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }

    let name = name.ok_or(FuzzyError::Parse {
        line: 1,
        column: 1,
        message: "missing `fis \"<name>\"` line".into(),
    })?;
    let output = output.ok_or(FuzzyError::Invalid("missing `output` variable".into()))?;

    let mut config = FisConfig {
        name,
        inputs,
        output,
        rules: Vec::with_capacity(rules.len()),
        resolution,
    };
    for (rule, line) in rules {
        if let Some(out) = rule_output_name(&rule) {
            if out != config.output.name {
                return Err(FuzzyError::Parse {
                    line,
                    column: 1,
                    message: format!("rule consequent names `{out}`, not the output `{}`", config.output.name),
                });
            }
        }
        config.rules.push(strip_output_name(rule));
    }
    config.validate()?;
    Ok(config)
}

// The parser carries `Out=Label` through `consequent` until the output
// variable is known; these two helpers split it back apart.
fn rule_output_name(rule: &Rule) -> Option<&str> {
    rule.consequent.split_once('=').map(|(v, _)| v)
}

fn strip_output_name(mut rule: Rule) -> Rule {
    if let Some((_, label)) = rule.consequent.split_once('=') {
        rule.consequent = label.to_string();
    }
    rule
}

fn parse_rule(line: &Line<'_>) -> Result<Rule, FuzzyError> {
    let arrow = line
        .tokens
        .iter()
        .position(|t| t.text == "=>")
        .ok_or_else(|| line.err(line.tokens.len(), "rule needs `=>`"))?;
    if arrow == 1 {
        return Err(line.err(1, "rule needs at least one antecedent"));
    }

    let split_pair = |i: usize| -> Result<(String, String), FuzzyError> {
        let t = line.text(i, "`Var=Label`")?;
        match t.split_once('=') {
            Some((v, l)) if !v.is_empty() && !l.is_empty() && !l.contains('=') => Ok((v.to_string(), l.to_string())),
            _ => Err(line.err(i, format!("expected `Var=Label`, found `{t}`"))),
        }
    };

    let mut antecedent = Vec::new();
    let mut connective: Option<Connective> = None;
    for i in 1..arrow {
        if (i - 1) % 2 == 1 {
            let c = match line.tokens[i].text {
                "&" => Connective::And,
                "|" => Connective::Or,
                other => return Err(line.err(i, format!("expected `&` or `|`, found `{other}`"))),
            };
            if connective.is_some_and(|prev| prev != c) {
                return Err(line.err(i, "`&` and `|` cannot be mixed within one rule"));
            }
            connective = Some(c);
        } else {
            let (variable, term) = split_pair(i)?;
            antecedent.push(Clause { variable, term });
        }
    }
    if (arrow - 1) % 2 == 0 {
        return Err(line.err(arrow - 1, "dangling connective before `=>`"));
    }

    let (out_var, out_label) = split_pair(arrow + 1)?;
    let mut weight = 1.0;
    match line.tokens.len() - (arrow + 2) {
        0 => {}
        2 if line.tokens[arrow + 2].text == "weight" => {
            weight = line.number(arrow + 3, "weight")?;
            if !(weight > 0.0 && weight <= 1.0) {
                return Err(line.err(arrow + 3, "weight must lie in (0, 1]"));
            }
        }
        _ => return Err(line.err(arrow + 2, "expected `weight <w>` or end of rule")),
    }

    Ok(Rule {
        antecedent,
        connective: connective.unwrap_or(Connective::And),
        consequent: format!("{out_var}={out_label}"),
        weight,
    })
}

/// Writes `config` in the text format. `parse_fis(&serialize_fis(c)) == c`.
pub fn serialize_fis(config: &FisConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fis \"{}\"", config.name);
    let _ = writeln!(out, "resolution {}", config.resolution);
    let mut write_var = |keyword: &str, v: &LinguisticVariable| {
        let _ = writeln!(out, "{keyword} {} range {} {}", v.name, v.lo, v.hi);
        for t in &v.terms {
            let params: Vec<String> = t.mf.params().iter().map(f64::to_string).collect();
            let _ = writeln!(out, "  mf {} {} {}", t.label, t.mf.keyword(), params.join(" "));
        }
    };
    for v in &config.inputs {
        write_var("input", v);
    }
    write_var("output", &config.output);
    for r in &config.rules {
        let sep = match r.connective {
            Connective::And => " & ",
            Connective::Or => " | ",
        };
        let lhs: Vec<String> = r
            .antecedent
            .iter()
            .map(|c| format!("{}={}", c.variable, c.term))
            .collect();
        let _ = writeln!(
            out,
            "rule {} => {}={} weight {}",
            lhs.join(sep),
            config.output.name,
            r.consequent,
            r.weight
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::testutil::small_config;
    use super::*;

    #[test]
    fn round_trip() {
        let c = small_config();
        let text = serialize_fis(&c);
        assert_eq!(parse_fis(&text).unwrap(), c);
    }

    #[test]
    fn shipped_default_parses() {
        let c = parse_fis(super::super::DEFAULT_FIS).unwrap();
        assert_eq!(c.output.lo, 55.0);
        assert_eq!(c.output.hi, 80.0);
        assert_eq!(c.resolution, 1001);
        assert_eq!(parse_fis(&serialize_fis(&c)).unwrap(), c);
    }

    const BASE: &str = "fis \"t\" # comment\nresolution 101\ninput X range 0 10\n  mf Low tri 0 0 10\noutput Y range 0 1\n  mf Mid tri 0 0.5 1\n";

    #[test]
    fn weight_defaults_to_one() {
        let c = parse_fis(&format!("{BASE}rule X=Low => Y=Mid\n")).unwrap();
        assert_eq!(c.rules[0].weight, 1.0);
        assert_eq!(c.rules[0].connective, Connective::And);
        assert_eq!(c.name, "t");
    }

    #[test]
    fn dangling_label() {
        let err = parse_fis(&format!("{BASE}rule X=Low => Y=Huge\n")).unwrap_err();
        assert_eq!(
            err,
            FuzzyError::UnknownTerm {
                variable: "Y".into(),
                label: "Huge".into()
            }
        );
        assert!(err.to_string().contains("Huge"));
    }

    #[test]
    fn parameter_order_error() {
        let text = "fis \"t\"\ninput X range 0 30\n  mf Low tri 10 4 24\n";
        match parse_fis(text).unwrap_err() {
            FuzzyError::Parse { line, column, message } => {
                assert_eq!((line, column), (3, 14));
                assert!(message.contains("a <= b <= c"), "{message}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            (
                format!("{BASE}  mf Odd spline 1 2\n"),
                7,
                "unknown membership function kind",
            ),
            (
                format!("{BASE}rule X=Low & X=Low | X=Low => Y=Mid\n"),
                7,
                "cannot be mixed",
            ),
            (format!("{BASE}rule X=Low => Y=Mid weight 2\n"), 7, "weight"),
            ("fis \"t\"\nresolution 100\n".to_string(), 2, "resolution"),
            ("fis \"t\"\nbogus 1\n".to_string(), 2, "unknown keyword"),
            ("mf A tri 0 1 2\n".to_string(), 1, "before any"),
        ];
        for (text, want_line, needle) in cases {
            match parse_fis(&text) {
                Err(FuzzyError::Parse { line, message, .. }) => {
                    assert_eq!(line, want_line, "{message}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(matches!(
            parse_fis(&format!("{BASE}rule X=Low => Z=Mid\n")),
            Err(FuzzyError::Parse { line: 7, .. })
        ));
    }
}
