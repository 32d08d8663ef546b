use super::conv::{apply_proximity, max_pool_masked, pwconv_backward, pwconv_forward_with_pre};
use super::lstm::{lstm_backward, lstm_forward, LstmCache};
use super::output::{classify, cross_entropy};
use super::params::{Gradients, ModelParams};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{axpy, Matrix};

/// One (possibly padded) sentence.
///
/// `tokens` and `proximity` may extend past `len` with padding; the LSTM
/// only reads the first `len` tokens and padded rows are excluded from
/// max-pooling.
#[derive(Clone, Copy, Debug)]
pub struct SequenceInput<'a, T> {
    pub tokens: &'a [usize],
    pub proximity: &'a [T],
    pub len: usize,
}

impl<'a, T> SequenceInput<'a, T> {
    pub fn new(tokens: &'a [usize], proximity: &'a [T]) -> Self {
        SequenceInput {
            tokens,
            proximity,
            len: tokens.len(),
        }
    }
}

/// Every activation the backward pass needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardTrace<T> {
    pub tokens: Vec<usize>,
    pub proximity: Vec<T>,
    /// Real (unpadded) length.
    pub len: usize,
    pub lstm_fwd: LstmCache<T>,
    /// Rows in right-to-left processing order.
    pub lstm_bwd: LstmCache<T>,
    /// `N × 2h` BiLSTM output; padded rows are zero.
    pub hidden: Matrix<T>,
    /// `N × 2h` proximity-weighted states.
    pub weighted: Matrix<T>,
    pub conv_pre: Matrix<T>,
    /// `N × 2h`, post-ReLU.
    pub conv_out: Matrix<T>,
    pub pooled: Vec<T>,
    /// Winning row per pooled channel.
    pub argmax: Vec<usize>,
    pub logits: Vec<T>,
    pub probs: Vec<T>,
}

impl<T: Scalar> ForwardTrace<T> {
    /// Argmax class; ties go to the lower index.
    pub fn prediction(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = k;
            }
        }
        best
    }

    pub fn loss(&self, label: usize) -> T {
        cross_entropy(&self.probs, label).0
    }
}

pub fn forward<T: Scalar>(params: &ModelParams<T>, input: SequenceInput<'_, T>) -> Result<ForwardTrace<T>> {
    let total = input.tokens.len();
    let len = input.len;
    if input.proximity.len() != total {
        return Err(Error::Shape(format!(
            "{total} tokens but {} proximity weights",
            input.proximity.len()
        )));
    }
    if len == 0 || len > total {
        return Err(Error::Shape(format!("real length {len} for {total} positions")));
    }
    if let Some(&bad) = input.tokens[..len].iter().find(|&&t| t >= params.vocab_size()) {
        return Err(Error::Shape(format!(
            "token index {bad} outside vocabulary of {}",
            params.vocab_size()
        )));
    }

    let h = params.hyper.hidden_dim;
    let rows: Vec<&[T]> = input.tokens[..len]
        .iter()
        .map(|&t| params.embedding.row(t))
        .collect();
    let reversed: Vec<&[T]> = rows.iter().rev().copied().collect();
    let lstm_fwd = lstm_forward(&params.lstm_fwd, &rows);
    let lstm_bwd = lstm_forward(&params.lstm_bwd, &reversed);

    let mut hidden = Matrix::zeros(total, 2 * h);
    for i in 0..len {
        let row = hidden.row_mut(i);
        row[..h].copy_from_slice(lstm_fwd.hidden.row(i));
        row[h..].copy_from_slice(lstm_bwd.hidden.row(len - 1 - i));
    }
    let weighted = apply_proximity(&hidden, input.proximity)?;
    let (conv_pre, conv_out) = pwconv_forward_with_pre(
        &weighted,
        &params.conv_weight,
        &params.conv_bias,
        params.hyper.kernel_len,
    )?;
    let (pooled, argmax) = max_pool_masked(&conv_out, len);
    let (logits, probs) = classify(&pooled, &params.fc_weight, &params.fc_bias)?;

    Ok(ForwardTrace {
        tokens: input.tokens.to_vec(),
        proximity: input.proximity.to_vec(),
        len,
        lstm_fwd,
        lstm_bwd,
        hidden,
        weighted,
        conv_pre,
        conv_out,
        pooled,
        argmax,
        logits,
        probs,
    })
}

/// Accumulates `∂(-ln y[label])/∂θ` into `grads`. The L2 term is not
/// included.
pub fn backward_into<T: Scalar>(
    params: &ModelParams<T>,
    trace: &ForwardTrace<T>,
    label: usize,
    grads: &mut Gradients<T>,
) {
    let h = params.hyper.hidden_dim;
    let feat = 2 * h;
    let len = trace.len;
    let total = trace.tokens.len();

    let mut d_logits = trace.probs.clone();
    d_logits[label] = d_logits[label] - T::one();
    grads.fc_weight.add_outer(&trace.pooled, &d_logits);
    axpy(T::one(), &d_logits, &mut grads.fc_bias);
    let mut d_pooled = vec![T::zero(); feat];
    params.fc_weight.matvec_into(&d_logits, &mut d_pooled);

    let mut d_q = Matrix::zeros(total, feat);
    for (j, (&i, &g)) in trace.argmax.iter().zip(&d_pooled).enumerate() {
        d_q.set(i, j, g);
    }

    let grads = &mut **grads;
    let d_weighted = pwconv_backward(
        &trace.weighted,
        &trace.conv_pre,
        &d_q,
        &params.conv_weight,
        params.hyper.kernel_len,
        &mut grads.conv_weight,
        &mut grads.conv_bias,
    );

    let mut d_fwd = Matrix::zeros(len, h);
    let mut d_bwd = Matrix::zeros(len, h);
    for i in 0..len {
        let p = trace.proximity[i];
        let src = d_weighted.row(i);
        for (d, &s) in d_fwd.row_mut(i).iter_mut().zip(&src[..h]) {
            *d = p * s;
        }
        for (d, &s) in d_bwd.row_mut(len - 1 - i).iter_mut().zip(&src[h..]) {
            *d = p * s;
        }
    }

    let rows: Vec<&[T]> = trace.tokens[..len]
        .iter()
        .map(|&t| params.embedding.row(t))
        .collect();
    let reversed: Vec<&[T]> = rows.iter().rev().copied().collect();
    let d_e = params.hyper.embed_dim;
    let mut d_in_fwd = vec![vec![T::zero(); d_e]; len];
    let mut d_in_bwd = vec![vec![T::zero(); d_e]; len];
    lstm_backward(&params.lstm_fwd, &rows, &trace.lstm_fwd, &d_fwd, &mut grads.lstm_fwd, &mut d_in_fwd);
    lstm_backward(&params.lstm_bwd, &reversed, &trace.lstm_bwd, &d_bwd, &mut grads.lstm_bwd, &mut d_in_bwd);

    for (i, &tok) in trace.tokens[..len].iter().enumerate() {
        let row = grads.embedding.row_mut(tok);
        axpy(T::one(), &d_in_fwd[i], row);
        axpy(T::one(), &d_in_bwd[len - 1 - i], row);
    }
}

/// Full single-example gradient of `-ln y[label] + λ Σ θ²`.
pub fn backward<T: Scalar>(
    params: &ModelParams<T>,
    trace: &ForwardTrace<T>,
    label: usize,
    lambda: T,
) -> Gradients<T> {
    let mut grads = Gradients::zeros_like(params);
    backward_into(params, trace, label, &mut grads);
    grads.add_l2(params, lambda);
    grads
}
