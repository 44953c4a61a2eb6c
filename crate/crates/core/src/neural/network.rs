use serde::{Deserialize, Serialize};

use super::{NetworkKind, NetworkSpec, NeuralError, XorShift64Star};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    fn random(rows: usize, cols: usize, rng: &mut XorShift64Star) -> Self {
        Matrix {
            rows,
            cols,
            data: (0..rows * cols).map(|_| rng.centered()).collect(),
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Adds `self * x` into `out`.
    fn mul_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.row(r).iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
    }

    /// Adds `delta * x^T` into `self`.
    fn add_outer(&mut self, delta: &[f64], x: &[f64]) {
        for (r, d) in delta.iter().enumerate() {
            for (w, xi) in self.data[r * self.cols..(r + 1) * self.cols].iter_mut().zip(x) {
                *w += d * xi;
            }
        }
    }
}

/// One layer's parameters. Also used to hold gradients of the same shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// `out x in`, where `in` is the previous layer's width.
    pub weights: Matrix,
    pub bias: Vec<f64>,
    /// Cascade only: `out x input_width` connection from the raw input.
    pub skip: Option<Matrix>,
    /// Recurrent kinds only: `out x out` connection from this layer's
    /// previous activation.
    pub context: Option<Matrix>,
}

impl Layer {
    fn zeros_like(&self) -> Layer {
        Layer {
            weights: Matrix::zeros(self.weights.rows, self.weights.cols),
            bias: vec![0.0; self.bias.len()],
            skip: self.skip.as_ref().map(|m| Matrix::zeros(m.rows, m.cols)),
            context: self.context.as_ref().map(|m| Matrix::zeros(m.rows, m.cols)),
        }
    }

    pub fn width(&self) -> usize {
        self.bias.len()
    }

    fn param_slices(&self) -> Vec<&[f64]> {
        let mut v: Vec<&[f64]> = vec![&self.weights.data, &self.bias];
        v.extend(self.skip.as_ref().map(|m| m.data.as_slice()));
        v.extend(self.context.as_ref().map(|m| m.data.as_slice()));
        v
    }

    fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        let mut v: Vec<&mut [f64]> = vec![&mut self.weights.data, &mut self.bias];
        v.extend(self.skip.as_mut().map(|m| m.data.as_mut_slice()));
        v.extend(self.context.as_mut().map(|m| m.data.as_mut_slice()));
        v
    }
}

/// Previous activation of every hidden layer that has a context
/// connection; empty vectors for layers without one.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextState(pub Vec<Vec<f64>>);

#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub output: f64,
    /// Activations of the hidden layers.
    pub activations: Vec<Vec<f64>>,
    pub next_context: ContextState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub spec: NetworkSpec,
    /// Hidden layers followed by the single-unit output layer.
    pub layers: Vec<Layer>,
    pub seed: u64,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Network {
    /// Draws every parameter from uniform(-0.5, 0.5) with
    /// [`XorShift64Star`] seeded by `seed`. Layers are filled in order and,
    /// within a layer, weights (row-major), bias, skip, context.
    pub fn init(spec: NetworkSpec, seed: u64) -> Result<Network, NeuralError> {
        spec.validate()?;
        let mut rng = XorShift64Star::new(seed);
        let input = spec.input_width();
        let mut widths = vec![input];
        widths.extend(&spec.hidden);
        widths.push(1);
        let hidden_count = spec.hidden.len();
        let layers = (0..widths.len() - 1)
            .map(|l| {
                let (fan_in, out) = (widths[l], widths[l + 1]);
                let is_hidden = l < hidden_count;
                let weights = Matrix::random(out, fan_in, &mut rng);
                let bias = (0..out).map(|_| rng.centered()).collect();
                let skip = (spec.kind == NetworkKind::Cascade && l > 0).then(|| Matrix::random(out, input, &mut rng));
                let has_context = match spec.kind {
                    NetworkKind::Elman => l == 0,
                    NetworkKind::LayerRecurrent => is_hidden,
                    _ => false,
                };
                let context = has_context.then(|| Matrix::random(out, out, &mut rng));
                Layer {
                    weights,
                    bias,
                    skip,
                    context,
                }
            })
            .collect();
        Ok(Network { spec, layers, seed })
    }

    pub fn hidden_count(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn zero_context(&self) -> ContextState {
        ContextState(
            self.layers[..self.hidden_count()]
                .iter()
                .map(|l| {
                    if l.context.is_some() {
                        vec![0.0; l.width()]
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
        )
    }

    pub fn param_count(&self) -> usize {
        self.param_slices().iter().map(|s| s.len()).sum()
    }

    /// Parameters in a fixed order: layer by layer, weights, bias, skip, context.
    pub fn param_slices(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(Layer::param_slices).collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(Layer::param_slices_mut).collect()
    }

    pub fn params(&self) -> Vec<f64> {
        self.param_slices().concat()
    }

    fn set_param(&mut self, mut index: usize, value: f64) {
        for s in self.param_slices_mut() {
            if index < s.len() {
                s[index] = value;
                return;
            }
            index -= s.len();
        }
        panic!("parameter index out of range");
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NeuralError> {
        let expected = self.spec.input_width();
        if x.len() != expected {
            return Err(NeuralError::WidthMismatch { expected, got: x.len() });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64], ctx: &ContextState) -> Result<Forward, NeuralError> {
        self.check_input(x)?;
        let hidden = self.hidden_count();
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(hidden);
        let mut output = 0.0;
        for (l, layer) in self.layers.iter().enumerate() {
            let prev: &[f64] = if l == 0 { x } else { &activations[l - 1] };
            let mut z = layer.bias.clone();
            layer.weights.mul_add(prev, &mut z);
            if let Some(skip) = &layer.skip {
                skip.mul_add(x, &mut z);
            }
            if let Some(context) = &layer.context {
                let state = ctx.0.get(l).filter(|s| s.len() == layer.width());
                let state = state.ok_or(NeuralError::WidthMismatch {
                    expected: layer.width(),
                    got: ctx.0.get(l).map_or(0, Vec::len),
                })?;
                context.mul_add(state, &mut z);
            }
            if l < hidden {
                activations.push(z.into_iter().map(sigmoid).collect());
            } else {
                output = z[0];
            }
        }
        let next_context = ContextState(
            self.layers[..hidden]
                .iter()
                .zip(&activations)
                .map(|(layer, a)| if layer.context.is_some() { a.clone() } else { Vec::new() })
                .collect(),
        );
        Ok(Forward {
            output,
            activations,
            next_context,
        })
    }

    /// Squared error `(y_hat - target)^2` for one sample.
    pub fn loss(&self, x: &[f64], target: f64, ctx: &ContextState) -> Result<f64, NeuralError> {
        let e = self.forward(x, ctx)?.output - target;
        Ok(e * e)
    }

    pub(crate) fn apply_update(&mut self, grads: &[Layer], rate: f64) {
        for (layer, g) in self.layers.iter_mut().zip(grads) {
            for (p, gp) in layer.param_slices_mut().into_iter().zip(g.param_slices()) {
                for (w, d) in p.iter_mut().zip(gp) {
                    *w -= rate * d;
                }
            }
        }
    }
}

/// Gradient of `(y_hat - target)^2` with respect to every parameter, with
/// the context state treated as a constant input (one-step truncation).
pub fn gradient(net: &Network, x: &[f64], target: f64, ctx: &ContextState) -> Result<Vec<Layer>, NeuralError> {
    let fwd = net.forward(x, ctx)?;
    Ok(backward(net, x, target, ctx, &fwd))
}

pub(crate) fn backward(net: &Network, x: &[f64], target: f64, ctx: &ContextState, fwd: &Forward) -> Vec<Layer> {
    let hidden = net.hidden_count();
    let mut grads: Vec<Layer> = net.layers.iter().map(Layer::zeros_like).collect();
    let mut delta = vec![2.0 * (fwd.output - target)];
    for l in (0..=hidden).rev() {
        let layer = &net.layers[l];
        let prev: &[f64] = if l == 0 { x } else { &fwd.activations[l - 1] };
        let g = &mut grads[l];
        g.weights.add_outer(&delta, prev);
        for (b, d) in g.bias.iter_mut().zip(&delta) {
            *b += d;
        }
        if let Some(skip) = g.skip.as_mut() {
            skip.add_outer(&delta, x);
        }
        if let Some(context) = g.context.as_mut() {
            context.add_outer(&delta, &ctx.0[l]);
        }
        if l == 0 {
            break;
        }
        let a = &fwd.activations[l - 1];
        delta = (0..layer.weights.cols)
            .map(|j| {
                let back: f64 = (0..layer.weights.rows)
                    .map(|i| layer.weights.data[i * layer.weights.cols + j] * delta[i])
                    .sum();
                back * a[j] * (1.0 - a[j])
            })
            .collect();
    }
    grads
}

/// Largest relative deviation between the analytic gradient and central
/// differences `(f(w + eps) - f(w - eps)) / (2 eps)`, over all parameters.
/// Deviation is `|a - n| / max(1e-12, |a| + |n|)`.
pub fn gradient_check(
    net: &Network,
    x: &[f64],
    target: f64,
    ctx: &ContextState,
    epsilon: f64,
) -> Result<f64, NeuralError> {
    Ok(gradient_deviations(net, x, target, ctx, epsilon)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Per-parameter deviations behind [`gradient_check`], in
/// [`Network::param_slices`] order.
pub fn gradient_deviations(
    net: &Network,
    x: &[f64],
    target: f64,
    ctx: &ContextState,
    epsilon: f64,
) -> Result<Vec<f64>, NeuralError> {
    if !(epsilon > 0.0) {
        return Err(NeuralError::BadEpsilon(epsilon));
    }
    let analytic: Vec<f64> = gradient(net, x, target, ctx)?
        .iter()
        .flat_map(|l| l.param_slices().concat())
        .collect();
    let base = net.params();
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(base.len());
    for (i, (&w, &a)) in base.iter().zip(&analytic).enumerate() {
        probe.set_param(i, w + epsilon);
        let up = probe.loss(x, target, ctx)?;
        probe.set_param(i, w - epsilon);
        let down = probe.loss(x, target, ctx)?;
        probe.set_param(i, w);
        let numeric = (up - down) / (2.0 * epsilon);
        out.push((a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-12));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Feature;

    fn spec(kind: NetworkKind, hidden: Vec<usize>) -> NetworkSpec {
        NetworkSpec::new(kind, Feature::ALL.to_vec(), hidden).unwrap()
    }

    #[test]
    fn init_is_deterministic() {
        let a = Network::init(spec(NetworkKind::Cascade, vec![3, 2]), 11).unwrap();
        let b = Network::init(spec(NetworkKind::Cascade, vec![3, 2]), 11).unwrap();
        let c = Network::init(spec(NetworkKind::Cascade, vec![3, 2]), 12).unwrap();
        assert_eq!(
            a.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        assert_ne!(a.params(), c.params());
        assert!(a.params().iter().all(|v| (-0.5..0.5).contains(v)));
    }

    #[test]
    fn zero_width_is_rejected() {
        assert_eq!(
            NetworkSpec::new(NetworkKind::Feedforward, Feature::ALL.to_vec(), vec![0]),
            Err(NeuralError::ZeroWidth)
        );
        assert!(NetworkSpec::new(NetworkKind::Feedforward, vec![], vec![2]).is_err());
        assert!(NetworkSpec::new(NetworkKind::Feedforward, Feature::ALL.to_vec(), vec![]).is_err());
    }

    #[test]
    fn shapes_per_kind() {
        let ff = Network::init(spec(NetworkKind::Feedforward, vec![3, 2]), 1).unwrap();
        assert_eq!(ff.param_count(), (4 * 3 + 3) + (3 * 2 + 2) + (2 + 1));
        let cas = Network::init(spec(NetworkKind::Cascade, vec![3, 2]), 1).unwrap();
        assert!(cas.layers[0].skip.is_none());
        assert_eq!(cas.layers[1].skip.as_ref().unwrap().cols, 4);
        assert_eq!(cas.layers[2].skip.as_ref().unwrap().rows, 1);
        let el = Network::init(spec(NetworkKind::Elman, vec![3, 2]), 1).unwrap();
        assert!(el.layers[0].context.is_some() && el.layers[1].context.is_none());
        let lr = Network::init(spec(NetworkKind::LayerRecurrent, vec![3, 2]), 1).unwrap();
        assert!(lr.layers[0].context.is_some() && lr.layers[1].context.is_some());
        assert!(lr.layers[2].context.is_none());
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let mut n = Network::init(spec(NetworkKind::LayerRecurrent, vec![4]), 3).unwrap();
        for s in n.param_slices_mut() {
            s.fill(0.0);
        }
        let out = n.forward(&[0.3, 0.1, 0.9, 0.5], &n.zero_context()).unwrap();
        assert_eq!(out.output, 0.0);
    }

    #[test]
    fn width_mismatch() {
        let n = Network::init(spec(NetworkKind::Feedforward, vec![2]), 3).unwrap();
        assert_eq!(
            n.forward(&[0.1, 0.2], &n.zero_context()).unwrap_err(),
            NeuralError::WidthMismatch { expected: 4, got: 2 }
        );
    }

    #[test]
    fn zero_context_matches_feedforward() {
        let x = [0.2, 0.7, 0.4, 0.9];
        for kind in [NetworkKind::Elman, NetworkKind::LayerRecurrent] {
            let rec = Network::init(spec(kind, vec![4, 3]), 5).unwrap();
            let mut ff = rec.clone();
            ff.spec.kind = NetworkKind::Feedforward;
            for l in &mut ff.layers {
                l.context = None;
            }
            let a = rec.forward(&x, &rec.zero_context()).unwrap();
            let b = ff.forward(&x, &ff.zero_context()).unwrap();
            assert_eq!(a.output, b.output);
        }
    }

    #[test]
    fn cascade_with_zero_skips_matches_feedforward() {
        let x = [0.2, 0.7, 0.4, 0.9];
        let mut cas = Network::init(spec(NetworkKind::Cascade, vec![4, 3]), 5).unwrap();
        for l in &mut cas.layers {
            if let Some(s) = l.skip.as_mut() {
                s.data.fill(0.0);
            }
        }
        let mut ff = cas.clone();
        for l in &mut ff.layers {
            l.skip = None;
        }
        let a = cas.forward(&x, &cas.zero_context()).unwrap().output;
        let b = ff.forward(&x, &ff.zero_context()).unwrap().output;
        assert_eq!(a, b);
    }

    #[test]
    fn output_layer_gradient_closed_form() {
        let n = Network::init(spec(NetworkKind::Feedforward, vec![3]), 9).unwrap();
        let x = [0.1, 0.5, 0.2, 0.8];
        let ctx = n.zero_context();
        let fwd = n.forward(&x, &ctx).unwrap();
        let target = 0.4;
        let g = gradient(&n, &x, target, &ctx).unwrap();
        let h = &fwd.activations[0];
        for (j, gw) in g[1].weights.data.iter().enumerate() {
            assert!((gw - 2.0 * (fwd.output - target) * h[j]).abs() < 1e-15);
        }
        assert!((g[1].bias[0] - 2.0 * (fwd.output - target)).abs() < 1e-15);

        // already exact: every output-layer gradient vanishes
        let g0 = gradient(&n, &x, fwd.output, &ctx).unwrap();
        assert!(g0[1].weights.data.iter().chain(&g0[1].bias).all(|v| *v == 0.0));
    }

    #[test]
    fn gradient_check_rejects_bad_epsilon() {
        let n = Network::init(spec(NetworkKind::Feedforward, vec![2]), 1).unwrap();
        let ctx = n.zero_context();
        let x = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(
            gradient_check(&n, &x, 0.5, &ctx, 0.0),
            Err(NeuralError::BadEpsilon(0.0))
        );
        assert!(gradient_check(&n, &x, 0.5, &ctx, -1e-5).is_err());
    }

    #[test]
    fn linear_output_layer_is_exact() {
        // the loss is quadratic in the output layer, so central differences
        // are exact up to rounding there
        let n = Network::init(spec(NetworkKind::Feedforward, vec![3]), 4).unwrap();
        let x = [0.3, 0.1, 0.7, 0.2];
        let dev = gradient_deviations(&n, &x, 0.9, &n.zero_context(), 1e-5).unwrap();
        let out_params = n.layers[1].param_slices().concat().len();
        let worst = dev[dev.len() - out_params..].iter().cloned().fold(0.0, f64::max);
        assert!(worst <= 1e-7, "{worst}");
    }

    #[test]
    fn gradient_check_all_kinds() {
        let x = [0.1, 0.6, 0.3, 0.8];
        for kind in NetworkKind::ALL {
            let n = Network::init(spec(kind, vec![4, 3]), 21).unwrap();
            // non-zero context so context weights are exercised
            let ctx = n
                .forward(&[0.9, 0.2, 0.5, 0.4], &n.zero_context())
                .unwrap()
                .next_context;
            let dev = gradient_check(&n, &x, 0.7, &ctx, 1e-5).unwrap();
            assert!(dev <= 1e-4, "{kind}: {dev}");
        }
    }
}
