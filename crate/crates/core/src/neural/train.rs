use serde::{Deserialize, Serialize};

use super::network::backward;
use super::{Network, NeuralError};
use crate::dataset::{Dataset, MinMaxParams, ProjectRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            epochs: 2000,
        }
    }
}

/// A network together with the scaling fitted on its training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedNetwork {
    pub network: Network,
    pub norm: MinMaxParams,
}

fn samples(norm: &MinMaxParams, data: &Dataset) -> Vec<(Vec<f64>, f64)> {
    data.records()
        .iter()
        .map(|r| (norm.transform(r), norm.transform_target(r.rde)))
        .collect()
}

/// Mean squared error over one pass with context threaded from zero.
fn pass_mse(net: &Network, samples: &[(Vec<f64>, f64)]) -> Result<f64, NeuralError> {
    let mut ctx = net.zero_context();
    let mut total = 0.0;
    for (x, t) in samples {
        let fwd = net.forward(x, &ctx)?;
        let e = fwd.output - t;
        total += e * e;
        ctx = fwd.next_context;
    }
    Ok(total / samples.len() as f64)
}

/// Online gradient descent on the normalized squared error, records in
/// dataset order. Returns the trained model and the MSE before training
/// followed by the MSE after each epoch.
pub fn train(
    network: Network,
    data: &Dataset,
    config: &TrainConfig,
) -> Result<(TrainedNetwork, Vec<f64>), NeuralError> {
    if data.is_empty() {
        return Err(NeuralError::EmptyTrain);
    }
    if !(config.learning_rate >= 0.0 && config.learning_rate.is_finite()) {
        return Err(NeuralError::BadLearningRate(config.learning_rate));
    }
    let norm = MinMaxParams::fit(data, &network.spec.features)?;
    let samples = samples(&norm, data);
    let mut net = network;
    let mut trace = Vec::with_capacity(config.epochs + 1);
    trace.push(pass_mse(&net, &samples)?);
    for _ in 0..config.epochs {
        let mut ctx = net.zero_context();
        for (x, t) in &samples {
            let fwd = net.forward(x, &ctx)?;
            let grads = backward(&net, x, *t, &ctx, &fwd);
            net.apply_update(&grads, config.learning_rate);
            ctx = fwd.next_context;
        }
        let mse = pass_mse(&net, &samples)?;
        if !mse.is_finite() {
            return Err(NeuralError::NonFinite("training loss"));
        }
        trace.push(mse);
    }
    Ok((TrainedNetwork { network: net, norm }, trace))
}

/// Effort in weeks for a single record, starting from a zero context.
pub fn predict(model: &TrainedNetwork, record: &ProjectRecord) -> Result<f64, NeuralError> {
    Ok(predict_sequence(model, std::slice::from_ref(record))?[0])
}

/// Efforts for `records` in order. Recurrent kinds carry their context
/// from one record to the next, starting from zero.
pub fn predict_sequence(model: &TrainedNetwork, records: &[ProjectRecord]) -> Result<Vec<f64>, NeuralError> {
    let net = &model.network;
    let mut ctx = net.zero_context();
    records
        .iter()
        .map(|r| {
            let fwd = net.forward(&model.norm.transform(r), &ctx)?;
            ctx = fwd.next_context;
            Ok(model.norm.inverse_target(fwd.output))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{builtin_dataset, recorded_split};
    use crate::neural::{NetworkKind, NetworkSpec};

    fn bits(v: &[f64]) -> Vec<u64> {
        v.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn zero_epochs_is_identity() {
        let (train_set, _) = recorded_split(&builtin_dataset()).unwrap();
        let net = Network::init(NetworkSpec::default_for(NetworkKind::Elman), 3).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.01,
            epochs: 0,
        };
        let (model, trace) = train(net.clone(), &train_set, &cfg).unwrap();
        assert_eq!(model.network, net);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn zero_rate_leaves_weights() {
        let (train_set, _) = recorded_split(&builtin_dataset()).unwrap();
        let net = Network::init(NetworkSpec::default_for(NetworkKind::Cascade), 3).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 7,
        };
        let (model, trace) = train(net.clone(), &train_set, &cfg).unwrap();
        assert_eq!(bits(&model.network.params()), bits(&net.params()));
        assert_eq!(trace.len(), 8);
    }

    #[test]
    fn training_is_deterministic() {
        let (train_set, _) = recorded_split(&builtin_dataset()).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.05,
            epochs: 50,
        };
        let run = || {
            let net = Network::init(NetworkSpec::default_for(NetworkKind::LayerRecurrent), 17).unwrap();
            train(net, &train_set, &cfg).unwrap()
        };
        let (a, ta) = run();
        let (b, tb) = run();
        assert_eq!(bits(&a.network.params()), bits(&b.network.params()));
        assert_eq!(bits(&ta), bits(&tb));
    }

    #[test]
    fn exact_network_output_denormalizes_to_rde() {
        let (train_set, _) = recorded_split(&builtin_dataset()).unwrap();
        let net = Network::init(NetworkSpec::default_for(NetworkKind::Feedforward), 1).unwrap();
        let (mut model, _) = train(
            net,
            &train_set,
            &TrainConfig {
                learning_rate: 0.0,
                epochs: 0,
            },
        )
        .unwrap();
        // zero every weight and set the output bias to the normalized target
        let r = *train_set.get(4).unwrap();
        for s in model.network.param_slices_mut() {
            s.fill(0.0);
        }
        let z = model.norm.transform_target(r.rde);
        model.network.layers.last_mut().unwrap().bias[0] = z;
        assert_eq!(predict(&model, &r).unwrap(), r.rde);
    }

    #[test]
    fn rejects_bad_inputs() {
        let net = Network::init(NetworkSpec::default_for(NetworkKind::Feedforward), 1).unwrap();
        let empty = Dataset::new(vec![], crate::dataset::DataSource::Embedded).unwrap();
        assert_eq!(
            train(net.clone(), &empty, &TrainConfig::default()).unwrap_err(),
            NeuralError::EmptyTrain
        );
        let cfg = TrainConfig {
            learning_rate: -1.0,
            epochs: 1,
        };
        assert!(train(net, &builtin_dataset(), &cfg).is_err());
    }
}
