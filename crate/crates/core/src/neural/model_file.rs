//! Text model file for [`TrainedNetwork`].
//!
//! ```text
//! effortlab-model 1
//! kind feedforward
//! features tcoe tcoa tcor cgpa
//! hidden 5
//! seed 42
//! norm tcoe 4 24          # one line per feature, in feature order
//! target rde 55 80
//! layer 0 weights 5 4     # rows cols, then one line per row
//! ...
//! layer 0 bias 5          # then one line
//! layer 1 skip 1 4        # cascade only, after bias
//! layer 0 context 5 5     # recurrent kinds only, after skip
//! ```
//!
//! Layers appear in order, hidden layers first. Values use the shortest
//! decimal form that round-trips, so parse(serialize(m)) is bit-exact.

use std::fmt::Write as _;

use super::{Matrix, Network, NetworkKind, NetworkSpec, NeuralError, TrainedNetwork};
use crate::dataset::{Feature, MinMaxParams, Range};

const MAGIC: &str = "effortlab-model 1";

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn serialize_model(model: &TrainedNetwork) -> String {
    let net = &model.network;
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "kind {}", net.spec.kind);
    let feats: Vec<&str> = net.spec.features.iter().map(|f| f.name()).collect();
    let _ = writeln!(out, "features {}", feats.join(" "));
    let hidden: Vec<String> = net.spec.hidden.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "hidden {}", hidden.join(" "));
    let _ = writeln!(out, "seed {}", net.seed);
    for (f, r) in &model.norm.features {
        let _ = writeln!(out, "norm {f} {} {}", r.min, r.max);
    }
    let _ = writeln!(out, "target rde {} {}", model.norm.target.min, model.norm.target.max);
    let write_matrix = |out: &mut String, l: usize, name: &str, m: &Matrix| {
        let _ = writeln!(out, "layer {l} {name} {} {}", m.rows, m.cols);
        for r in 0..m.rows {
            let _ = writeln!(out, "{}", join(m.row(r)));
        }
    };
    for (l, layer) in net.layers.iter().enumerate() {
        write_matrix(&mut out, l, "weights", &layer.weights);
        let _ = writeln!(out, "layer {l} bias {}", layer.bias.len());
        let _ = writeln!(out, "{}", join(&layer.bias));
        if let Some(m) = &layer.skip {
            write_matrix(&mut out, l, "skip", m);
        }
        if let Some(m) = &layer.context {
            write_matrix(&mut out, l, "context", m);
        }
    }
    out
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> NeuralError {
        NeuralError::ModelFile {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<Vec<&'a str>, NeuralError> {
        for (i, raw) in self.lines.by_ref() {
            self.line = i + 1;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            if !tokens.is_empty() {
                return Ok(tokens);
            }
        }
        self.line += 1;
        Err(self.err("unexpected end of file"))
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, NeuralError> {
        let t = self.next()?;
        if t[0] != key {
            return Err(self.err(format!("expected `{key}`, found `{}`", t[0])));
        }
        Ok(t[1..].to_vec())
    }

    fn numbers(&self, tokens: &[&str], expected: usize) -> Result<Vec<f64>, NeuralError> {
        if tokens.len() != expected {
            return Err(self.err(format!("expected {expected} values, found {}", tokens.len())));
        }
        tokens
            .iter()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.err(format!("`{t}` is not a finite number")))
            })
            .collect()
    }

    fn block(&mut self, layer: usize, name: &str, dims: &[usize]) -> Result<Vec<f64>, NeuralError> {
        let t = self.keyed("layer")?;
        let want: Vec<String> = std::iter::once(layer.to_string())
            .chain(std::iter::once(name.to_string()))
            .chain(dims.iter().map(usize::to_string))
            .collect();
        if t != want.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(self.err(format!("expected `layer {}`", want.join(" "))));
        }
        let (rows, cols) = if dims.len() == 2 {
            (dims[0], dims[1])
        } else {
            (1, dims[0])
        };
        let mut out = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let row = self.next()?;
            out.extend(self.numbers(&row, cols)?);
        }
        Ok(out)
    }

    fn range(&self, tokens: &[&str]) -> Result<Range, NeuralError> {
        let v = self.numbers(tokens, 2)?;
        if !(v[1] > v[0]) {
            return Err(self.err("range needs min < max"));
        }
        Ok(Range { min: v[0], max: v[1] })
    }
}

pub fn parse_model(text: &str) -> Result<TrainedNetwork, NeuralError> {
    let mut rd = Reader {
        lines: text.lines().enumerate().peekable(),
        line: 0,
    };
    let magic = rd.next()?;
    if magic.join(" ") != MAGIC {
        return Err(rd.err(format!("expected `{MAGIC}`")));
    }
    let kind: NetworkKind = match rd.keyed("kind")?.as_slice() {
        [k] => k.parse().map_err(|e: String| rd.err(e))?,
        _ => return Err(rd.err("expected `kind <name>`")),
    };
    let features = rd
        .keyed("features")?
        .iter()
        .map(|f| Feature::parse(f).ok_or_else(|| rd.err(format!("unknown feature `{f}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let hidden = rd
        .keyed("hidden")?
        .iter()
        .map(|h| h.parse::<usize>().map_err(|_| rd.err(format!("bad width `{h}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let seed = match rd.keyed("seed")?.as_slice() {
        [s] => s.parse::<u64>().map_err(|_| rd.err(format!("bad seed `{s}`")))?,
        _ => return Err(rd.err("expected `seed <n>`")),
    };
    let spec = NetworkSpec::new(kind, features.clone(), hidden).map_err(|e| rd.err(e.to_string()))?;

    let mut norm_features = Vec::with_capacity(features.len());
    for f in &features {
        let t = rd.keyed("norm")?;
        if t.first() != Some(&f.name()) {
            return Err(rd.err(format!("expected `norm {f}`")));
        }
        norm_features.push((*f, rd.range(&t[1..])?));
    }
    let t = rd.keyed("target")?;
    if t.first() != Some(&"rde") {
        return Err(rd.err("expected `target rde`"));
    }
    let target = rd.range(&t[1..])?;

    // The skeleton fixes which blocks exist and their shapes.
    let mut network = Network::init(spec, seed)?;
    for (l, layer) in network.layers.iter_mut().enumerate() {
        let (r, c) = (layer.weights.rows, layer.weights.cols);
        layer.weights.data = rd.block(l, "weights", &[r, c])?;
        layer.bias = rd.block(l, "bias", &[layer.bias.len()])?;
        if let Some(m) = layer.skip.as_mut() {
            m.data = rd.block(l, "skip", &[m.rows, m.cols])?;
        }
        if let Some(m) = layer.context.as_mut() {
            m.data = rd.block(l, "context", &[m.rows, m.cols])?;
        }
    }
    if rd.lines.any(|(_, l)| !l.trim().is_empty()) {
        return Err(rd.err("trailing content after the last layer"));
    }
    Ok(TrainedNetwork {
        network,
        norm: MinMaxParams {
            features: norm_features,
            target,
        },
    })
}
