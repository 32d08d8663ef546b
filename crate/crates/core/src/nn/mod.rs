//! The PWCN network with hand-derived gradients.
//!
//! Forward: embedding lookup → BiLSTM → proximity scaling → zero-padded
//! convolution + ReLU → max-pool → affine + softmax. [`backward_into`]
//! accumulates exact gradients of the cross-entropy term; the L2 term is
//! added separately with [`Gradients::add_l2`] so a batch pays it once.

mod conv;
mod lstm;
mod network;
mod output;
mod params;

pub use conv::{apply_proximity, max_pool, max_pool_masked, pwconv_backward, pwconv_forward, pwconv_forward_with_pre};
pub use lstm::{bilstm_forward, lstm_backward, lstm_forward, LstmCache};
pub use network::{backward, backward_into, forward, ForwardTrace, SequenceInput};
pub use output::{classify, cross_entropy, l2_penalty, softmax, PROB_FLOOR};
pub use params::{Gradients, HyperParams, LstmParams, ModelParams, FIELD_NAMES};
