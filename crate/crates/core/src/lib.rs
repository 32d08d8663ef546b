//! Aspect-level sentiment classification with a proximity-weighted
//! convolution network (PWCN).
//!
//! The pipeline runs word embeddings through a bidirectional LSTM, scales
//! each hidden state by the token's proximity to the aspect term, applies a
//! zero-padded 1-D convolution with ReLU, max-pools over the sentence and
//! classifies the pooled features with a softmax layer. Proximity is either
//! positional (distance to the nearest aspect border) or syntactic
//! (shortest-path distance in a dependency parse).
//!
//! All numerical code is generic over [`Scalar`]; training normally runs in
//! `f32` and gradient checks in `f64`. Proximity weights are additionally
//! computable over exact rationals.

pub mod checkpoint;
pub mod corpus;
mod error;
pub mod nn;
pub mod pipeline;
pub mod proximity;
mod scalar;
pub mod tensor;
pub mod train;

pub use error::{Error, Result};
pub use scalar::{cast, Scalar};

pub use corpus::{DepForest, EmbeddingTable, Instance, Polarity, Vocabulary};
pub use nn::{ForwardTrace, Gradients, HyperParams, ModelParams, SequenceInput};
pub use proximity::ProximityMode;
pub use train::{EvalReport, TrainConfig};

/// Single-precision model parameters, the training default.
pub type Params = ModelParams<f32>;
/// Double-precision model parameters, used for gradient checking.
pub type Params64 = ModelParams<f64>;
pub type Grads = Gradients<f32>;
pub type Grads64 = Gradients<f64>;
pub type Trace = ForwardTrace<f32>;
pub type Trace64 = ForwardTrace<f64>;
pub type Embeddings = EmbeddingTable<f32>;
