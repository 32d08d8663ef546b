use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::nn::HyperParams;
use crate::proximity::ProximityMode;

use super::adam::AdamConfig;
use super::init::DEFAULT_INIT_RANGE;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Coefficient of `Σ θ²`.
    pub l2: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    pub mode: ProximityMode,
    pub kernel_len: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Half-width of the uniform init for non-embedding tensors.
    pub init_range: f64,
    pub train_embeddings: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            l2: 1e-5,
            batch_size: 64,
            epochs: 30,
            seed: 0,
            mode: ProximityMode::Position,
            kernel_len: 3,
            embed_dim: 300,
            hidden_dim: 300,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_range: DEFAULT_INIT_RANGE,
            train_embeddings: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::Argument("learning rate must be positive".into()));
        }
        if self.l2.is_nan() || self.l2 < 0.0 {
            return Err(Error::Argument("L2 coefficient must be non-negative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Argument("batch size must be at least 1".into()));
        }
        if self.init_range.is_nan() || self.init_range <= 0.0 {
            return Err(Error::Argument("init range must be positive".into()));
        }
        self.hyper().validate()
    }

    pub fn hyper(&self) -> HyperParams {
        HyperParams {
            embed_dim: self.embed_dim,
            hidden_dim: self.hidden_dim,
            num_classes: Polarity::COUNT,
            kernel_len: self.kernel_len,
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}
