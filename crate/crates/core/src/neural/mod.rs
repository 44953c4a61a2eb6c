//! Small regressors for effort prediction: feedforward, cascade-forward,
//! Elman and layer-recurrent networks trained by online gradient descent,
//! plus a generalized regression network (GRNN).
//!
//! Recurrent kinds treat the record sequence (dataset order) as time. The
//! context state is reset to zero at the start of every training epoch and
//! every prediction pass, and context gradients are truncated after one step.

mod grnn;
mod model_file;
mod network;
mod rng;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, Feature};

pub use grnn::{grnn_predict, GrnnModel};
pub use model_file::{parse_model, serialize_model};
pub use network::{gradient, gradient_check, gradient_deviations, ContextState, Forward, Layer, Matrix, Network};
pub use rng::XorShift64Star;
pub use train::{predict, predict_sequence, train, TrainConfig, TrainedNetwork};

#[derive(Debug, Error, PartialEq)]
pub enum NeuralError {
    #[error("layer widths must be >= 1")]
    ZeroWidth,
    #[error("at least one hidden layer is required")]
    NoHiddenLayer,
    #[error("at least one input feature is required")]
    NoFeatures,
    #[error("input width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("epsilon must be > 0 (got {0})")]
    BadEpsilon(f64),
    #[error("sigma must be > 0 (got {0})")]
    BadSigma(f64),
    #[error("learning rate must be >= 0 (got {0})")]
    BadLearningRate(f64),
    #[error("training set is empty")]
    EmptyTrain,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("model file line {line}: {message}")]
    ModelFile { line: usize, message: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkKind {
    Feedforward,
    Cascade,
    Elman,
    LayerRecurrent,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 4] = [
        NetworkKind::Feedforward,
        NetworkKind::Cascade,
        NetworkKind::Elman,
        NetworkKind::LayerRecurrent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NetworkKind::Feedforward => "feedforward",
            NetworkKind::Cascade => "cascade",
            NetworkKind::Elman => "elman",
            NetworkKind::LayerRecurrent => "layer_recurrent",
        }
    }

    /// Conventional model acronym used in reports.
    pub fn acronym(self) -> &'static str {
        match self {
            NetworkKind::Feedforward => "FFBPNN",
            NetworkKind::Cascade => "Cascaded FFBPNN",
            NetworkKind::Elman => "EBPNN",
            NetworkKind::LayerRecurrent => "LRNN",
        }
    }

    pub fn is_recurrent(self) -> bool {
        matches!(self, NetworkKind::Elman | NetworkKind::LayerRecurrent)
    }
}

impl fmt::Display for NetworkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NetworkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "feedforward" | "ffbp" => Ok(NetworkKind::Feedforward),
            "cascade" => Ok(NetworkKind::Cascade),
            "elman" => Ok(NetworkKind::Elman),
            "layer_recurrent" | "layerrec" => Ok(NetworkKind::LayerRecurrent),
            other => Err(format!("unknown network kind `{other}`")),
        }
    }
}

/// Topology of a trainable network. Hidden layers use the logistic
/// sigmoid, the single output is linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub kind: NetworkKind,
    pub features: Vec<Feature>,
    pub hidden: Vec<usize>,
}

impl NetworkSpec {
    pub fn new(kind: NetworkKind, features: Vec<Feature>, hidden: Vec<usize>) -> Result<Self, NeuralError> {
        let spec = NetworkSpec { kind, features, hidden };
        spec.validate()?;
        Ok(spec)
    }

    /// All four record features, one hidden layer of five units.
    pub fn default_for(kind: NetworkKind) -> Self {
        NetworkSpec {
            kind,
            features: Feature::ALL.to_vec(),
            hidden: vec![5],
        }
    }

    pub fn input_width(&self) -> usize {
        self.features.len()
    }

    pub fn validate(&self) -> Result<(), NeuralError> {
        if self.features.is_empty() {
            return Err(NeuralError::NoFeatures);
        }
        if self.hidden.is_empty() {
            return Err(NeuralError::NoHiddenLayer);
        }
        if self.hidden.contains(&0) {
            return Err(NeuralError::ZeroWidth);
        }
        Ok(())
    }
}
