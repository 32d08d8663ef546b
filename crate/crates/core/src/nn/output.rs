use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::tensor::Matrix;

use super::params::ModelParams;

/// Lower bound applied to the gold probability before taking its log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Max-shifted softmax.
pub fn softmax<T: Scalar>(logits: &[T]) -> Result<Vec<T>> {
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite logits {logits:?}")));
    }
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&v| (v - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// `(logits, softmax(W_fᵀ q_s + b_f))`
pub fn classify<T: Scalar>(pooled: &[T], weight: &Matrix<T>, bias: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if weight.shape() != (pooled.len(), bias.len()) {
        return Err(Error::Shape(format!(
            "classifier weight {:?} vs {} features and {} classes",
            weight.shape(),
            pooled.len(),
            bias.len()
        )));
    }
    let mut logits = bias.to_vec();
    weight.matvec_t_acc(pooled, &mut logits);
    let probs = softmax(&logits)?;
    Ok((logits, probs))
}

/// `-ln y[label]`, with the probability floored at [`PROB_FLOOR`]. The flag
/// reports whether the floor was hit.
pub fn cross_entropy<T: Scalar>(probs: &[T], label: usize) -> (T, bool) {
    let floor: T = cast(PROB_FLOOR);
    let p = probs[label];
    if p < floor {
        (-floor.ln(), true)
    } else {
        (-p.ln(), false)
    }
}

/// `λ Σ θ²`
pub fn l2_penalty<T: Scalar>(params: &ModelParams<T>, lambda: T) -> T {
    lambda * params.sum_squares()
}
