use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{self, Matrix};

/// Architecture dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HyperParams {
    pub embed_dim: usize,
    /// Per-direction LSTM width; sentence features are twice this.
    pub hidden_dim: usize,
    pub num_classes: usize,
    /// Convolution window, odd.
    pub kernel_len: usize,
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.hidden_dim == 0 || self.num_classes == 0 {
            return Err(Error::Argument("all dimensions must be at least 1".into()));
        }
        if self.kernel_len == 0 || self.kernel_len.is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "kernel length must be odd and positive, got {}",
                self.kernel_len
            )));
        }
        Ok(())
    }

    /// Width of a BiLSTM output row.
    pub fn feature_dim(&self) -> usize {
        2 * self.hidden_dim
    }

    /// Half-window `⌊l/2⌋`.
    pub fn half_window(&self) -> usize {
        self.kernel_len / 2
    }
}

/// One LSTM direction. Gate blocks are stacked in the order input, forget,
/// cell candidate, output.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmParams<T> {
    /// `4h × d_e`
    pub w_input: Matrix<T>,
    /// `4h × h`
    pub w_hidden: Matrix<T>,
    /// `4h`
    pub bias: Vec<T>,
}

impl<T: Scalar> LstmParams<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        LstmParams {
            w_input: Matrix::zeros(4 * hidden_dim, input_dim),
            w_hidden: Matrix::zeros(4 * hidden_dim, hidden_dim),
            bias: vec![T::zero(); 4 * hidden_dim],
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_hidden.cols()
    }
}

/// Field names in checkpoint order.
pub const FIELD_NAMES: [&str; 11] = [
    "embedding",
    "lstm_fwd.w_input",
    "lstm_fwd.w_hidden",
    "lstm_fwd.bias",
    "lstm_bwd.w_input",
    "lstm_bwd.w_hidden",
    "lstm_bwd.bias",
    "conv.weight",
    "conv.bias",
    "fc.weight",
    "fc.bias",
];

/// All trainable tensors.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub hyper: HyperParams,
    /// `|V| × d_e`
    pub embedding: Matrix<T>,
    pub lstm_fwd: LstmParams<T>,
    pub lstm_bwd: LstmParams<T>,
    /// `(l·2h) × 2h`; row `w·2h + c` multiplies channel `c` of window slot `w`.
    pub conv_weight: Matrix<T>,
    pub conv_bias: Vec<T>,
    /// `2h × d_p`
    pub fc_weight: Matrix<T>,
    pub fc_bias: Vec<T>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn zeros(hyper: HyperParams, vocab_size: usize) -> Self {
        let f = hyper.feature_dim();
        ModelParams {
            hyper,
            embedding: Matrix::zeros(vocab_size, hyper.embed_dim),
            lstm_fwd: LstmParams::zeros(hyper.embed_dim, hyper.hidden_dim),
            lstm_bwd: LstmParams::zeros(hyper.embed_dim, hyper.hidden_dim),
            conv_weight: Matrix::zeros(hyper.kernel_len * f, f),
            conv_bias: vec![T::zero(); f],
            fc_weight: Matrix::zeros(f, hyper.num_classes),
            fc_bias: vec![T::zero(); hyper.num_classes],
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows()
    }

    /// `(rows, cols)` per field in [`FIELD_NAMES`] order; vectors are `(1, len)`.
    pub fn shapes(&self) -> [(usize, usize); 11] {
        let lstm = |p: &LstmParams<T>| [p.w_input.shape(), p.w_hidden.shape(), (1, p.bias.len())];
        let [a, b, c] = lstm(&self.lstm_fwd);
        let [d, e, g] = lstm(&self.lstm_bwd);
        [
            self.embedding.shape(),
            a,
            b,
            c,
            d,
            e,
            g,
            self.conv_weight.shape(),
            (1, self.conv_bias.len()),
            self.fc_weight.shape(),
            (1, self.fc_bias.len()),
        ]
    }

    pub fn tensors(&self) -> [&[T]; 11] {
        [
            self.embedding.as_slice(),
            self.lstm_fwd.w_input.as_slice(),
            self.lstm_fwd.w_hidden.as_slice(),
            &self.lstm_fwd.bias,
            self.lstm_bwd.w_input.as_slice(),
            self.lstm_bwd.w_hidden.as_slice(),
            &self.lstm_bwd.bias,
            self.conv_weight.as_slice(),
            &self.conv_bias,
            self.fc_weight.as_slice(),
            &self.fc_bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 11] {
        [
            self.embedding.as_mut_slice(),
            self.lstm_fwd.w_input.as_mut_slice(),
            self.lstm_fwd.w_hidden.as_mut_slice(),
            &mut self.lstm_fwd.bias,
            self.lstm_bwd.w_input.as_mut_slice(),
            self.lstm_bwd.w_hidden.as_mut_slice(),
            &mut self.lstm_bwd.bias,
            self.conv_weight.as_mut_slice(),
            &mut self.conv_bias,
            self.fc_weight.as_mut_slice(),
            &mut self.fc_bias,
        ]
    }

    pub fn num_scalars(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// `Σ θ²` over every tensor.
    pub fn sum_squares(&self) -> T {
        self.tensors()
            .iter()
            .fold(T::zero(), |acc, t| acc + tensor::sum_squares(t))
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// Checks every tensor shape against `hyper`.
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        let expected = ModelParams::<T>::zeros(self.hyper, self.vocab_size()).shapes();
        for ((name, want), got) in FIELD_NAMES.iter().zip(expected).zip(self.shapes()) {
            if want != got {
                return Err(Error::Shape(format!(
                    "{name}: expected {want:?}, found {got:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        let mut out = ModelParams::<U>::zeros(self.hyper, self.vocab_size());
        for (dst, src) in out.tensors_mut().into_iter().zip(self.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = U::from(s).unwrap_or_else(U::nan);
            }
        }
        out
    }
}

/// Gradient of the loss with respect to each [`ModelParams`] field.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T>(ModelParams<T>);

impl<T: Scalar> Gradients<T> {
    pub fn zeros_like(params: &ModelParams<T>) -> Self {
        Gradients(ModelParams::zeros(params.hyper, params.vocab_size()))
    }

    pub fn clear(&mut self) {
        for t in self.0.tensors_mut() {
            t.iter_mut().for_each(|v| *v = T::zero());
        }
    }

    /// `self += other`
    pub fn accumulate(&mut self, other: &Gradients<T>) {
        for (dst, src) in self.0.tensors_mut().into_iter().zip(other.0.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d + s;
            }
        }
    }

    /// Adds the gradient of `λ Σ θ²`, i.e. `2λθ`.
    pub fn add_l2(&mut self, params: &ModelParams<T>, lambda: T) {
        if lambda == T::zero() {
            return;
        }
        let two_lambda = lambda + lambda;
        for (dst, src) in self.0.tensors_mut().into_iter().zip(params.tensors()) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = *d + two_lambda * s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn into_inner(self) -> ModelParams<T> {
        self.0
    }
}

impl<T> Deref for Gradients<T> {
    type Target = ModelParams<T>;

    fn deref(&self) -> &ModelParams<T> {
        &self.0
    }
}

impl<T> DerefMut for Gradients<T> {
    fn deref_mut(&mut self) -> &mut ModelParams<T> {
        &mut self.0
    }
}
