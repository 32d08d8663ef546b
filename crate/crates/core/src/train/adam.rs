use crate::error::{Error, Result};
use crate::nn::{Gradients, ModelParams, FIELD_NAMES};
use crate::scalar::{cast, Scalar};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moments per parameter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub first: Vec<Vec<T>>,
    pub second: Vec<Vec<T>>,
    pub step: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(params: &ModelParams<T>) -> Self {
        let zeros: Vec<Vec<T>> = params
            .tensors()
            .iter()
            .map(|t| vec![T::zero(); t.len()])
            .collect();
        AdamState {
            first: zeros.clone(),
            second: zeros,
            step: 0,
        }
    }
}

/// One bias-corrected Adam update. Tensors whose index is in `frozen` are
/// left untouched (their moments stay zero).
///
/// A non-finite gradient aborts the step before anything is modified.
pub fn adam_step<T: Scalar>(
    params: &mut ModelParams<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
    config: &AdamConfig,
    frozen: &[usize],
) -> Result<()> {
    for (k, g) in grads.tensors().iter().enumerate() {
        if let Some(pos) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite gradient in {} at element {pos} (step {})",
                FIELD_NAMES[k],
                state.step + 1
            )));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let b1: T = cast(config.beta1);
    let b2: T = cast(config.beta2);
    let lr: T = cast(config.learning_rate);
    let eps: T = cast(config.epsilon);
    let one = T::one();
    let correct1 = one - b1.powi(t);
    let correct2 = one - b2.powi(t);

    let grads = grads.tensors();
    for (k, param) in params.tensors_mut().into_iter().enumerate() {
        if frozen.contains(&k) {
            continue;
        }
        let m = &mut state.first[k];
        let v = &mut state.second[k];
        for (((p, &g), mi), vi) in param.iter_mut().zip(grads[k]).zip(m.iter_mut()).zip(v.iter_mut()) {
            *mi = b1 * *mi + (one - b1) * g;
            *vi = b2 * *vi + (one - b2) * g * g;
            let m_hat = *mi / correct1;
            let v_hat = *vi / correct2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::HyperParams;

    fn tiny() -> ModelParams<f64> {
        let mut p = ModelParams::zeros(
            HyperParams {
                embed_dim: 1,
                hidden_dim: 1,
                num_classes: 2,
                kernel_len: 1,
            },
            3,
        );
        p.fc_bias = vec![0.3, -0.7];
        p
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let mut p = tiny();
        let before = p.clone();
        let g = Gradients::zeros_like(&p);
        let mut s = AdamState::new(&p);
        adam_step(&mut p, &g, &mut s, &AdamConfig::default(), &[]).unwrap();
        assert_eq!(p, before);
        assert_eq!(s.step, 1);
        assert_eq!(s, AdamState { step: 1, ..AdamState::new(&p) });
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = tiny();
        let mut g = Gradients::zeros_like(&p);
        g.fc_bias = vec![1.0, 1.0];
        let mut s = AdamState::new(&p);
        let cfg = AdamConfig {
            learning_rate: 0.1,
            ..AdamConfig::default()
        };
        adam_step(&mut p, &g, &mut s, &cfg, &[]).unwrap();
        assert!((p.fc_bias[0] - (0.3 - 0.1)).abs() < 1e-8);
        assert!((p.fc_bias[1] - (-0.7 - 0.1)).abs() < 1e-8);
        // identical histories update identically
        assert!(((p.fc_bias[0] - 0.3) - (p.fc_bias[1] + 0.7)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_gradient_aborts() {
        let mut p = tiny();
        let before = p.clone();
        let mut g = Gradients::zeros_like(&p);
        g.conv_bias[0] = f64::NAN;
        let mut s = AdamState::new(&p);
        let err = adam_step(&mut p, &g, &mut s, &AdamConfig::default(), &[]).unwrap_err();
        assert!(err.to_string().contains("conv.bias"));
        assert_eq!(p, before);
        assert_eq!(s.step, 0);
    }

    #[test]
    fn frozen_tensor_untouched() {
        let mut p = tiny();
        p.embedding.fill(0.5);
        let mut g = Gradients::zeros_like(&p);
        g.embedding.fill(1.0);
        let mut s = AdamState::new(&p);
        adam_step(&mut p, &g, &mut s, &AdamConfig::default(), &[0]).unwrap();
        assert!(p.embedding.as_slice().iter().all(|&v| v == 0.5));
    }
}
