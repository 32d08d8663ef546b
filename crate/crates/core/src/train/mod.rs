//! Training: parameter initialization, padded batching, Adam, the epoch
//! loop and accuracy / macro-F1 evaluation.

mod adam;
mod batch;
mod config;
mod init;
mod metrics;
mod trainer;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use batch::{encode_instances, epoch_seed, make_batches, Batch, Example};
pub use config::TrainConfig;
pub use init::{init_params, DEFAULT_INIT_RANGE};
pub use metrics::EvalReport;
pub use trainer::{
    batch_gradient, evaluate, predict, train, train_step, EpochRecord, TrainOutcome, GRAD_CHUNK,
};
