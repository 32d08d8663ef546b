use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::EmbeddingTable;
use crate::error::{Error, Result};
use crate::nn::{HyperParams, ModelParams};
use crate::scalar::{cast, Scalar};

pub const DEFAULT_INIT_RANGE: f64 = 0.01;

/// Copies the embedding table and draws every other tensor i.i.d. from the
/// open interval `(-range, range)`.
pub fn init_params<T: Scalar>(
    hyper: HyperParams,
    seed: u64,
    embeddings: &EmbeddingTable<T>,
    range: f64,
) -> Result<ModelParams<T>> {
    hyper.validate()?;
    if embeddings.dim() != hyper.embed_dim {
        return Err(Error::Shape(format!(
            "embedding table has dimension {}, model expects {}",
            embeddings.dim(),
            hyper.embed_dim
        )));
    }
    let mut params = ModelParams::zeros(hyper, embeddings.rows());
    params.embedding = embeddings.matrix.clone();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(-range, range);
    let bound: T = cast(range);
    for tensor in params.tensors_mut().into_iter().skip(1) {
        for v in tensor.iter_mut() {
            *v = loop {
                let x: T = cast(dist.sample(&mut rng));
                if x.abs() < bound {
                    break x;
                }
            };
        }
    }
    Ok(params)
}
