use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{axpy, dot, Matrix};

/// `r_i = p_i · h_i`
pub fn apply_proximity<T: Scalar>(hidden: &Matrix<T>, proximity: &[T]) -> Result<Matrix<T>> {
    if hidden.rows() != proximity.len() {
        return Err(Error::Shape(format!(
            "{} hidden rows but {} proximity weights",
            hidden.rows(),
            proximity.len()
        )));
    }
    let mut out = hidden.clone();
    for (i, &p) in proximity.iter().enumerate() {
        out.row_mut(i).iter_mut().for_each(|v| *v = *v * p);
    }
    Ok(out)
}

fn check_conv<T: Scalar>(input: &Matrix<T>, weight: &Matrix<T>, bias: &[T], kernel_len: usize) -> Result<()> {
    let c = input.cols();
    if kernel_len.is_multiple_of(2) {
        return Err(Error::Shape(format!("kernel length {kernel_len} is even")));
    }
    if weight.shape() != (kernel_len * c, bias.len()) {
        return Err(Error::Shape(format!(
            "conv weight {:?} incompatible with kernel {kernel_len}, {c} input channels, {} outputs",
            weight.shape(),
            bias.len()
        )));
    }
    Ok(())
}

/// Zero-padded convolution returning `(pre_activation, relu_output)`, both
/// `n × out`.
pub fn pwconv_forward_with_pre<T: Scalar>(
    input: &Matrix<T>,
    weight: &Matrix<T>,
    bias: &[T],
    kernel_len: usize,
) -> Result<(Matrix<T>, Matrix<T>)> {
    check_conv(input, weight, bias, kernel_len)?;
    let (n, c) = input.shape();
    let half = kernel_len / 2;
    let mut pre = Matrix::zeros(n, bias.len());
    for i in 0..n {
        let out = pre.row_mut(i);
        out.copy_from_slice(bias);
        for w in 0..kernel_len {
            let Some(j) = (i + w).checked_sub(half).filter(|&j| j < n) else {
                continue;
            };
            for (ch, &x) in input.row(j).iter().enumerate() {
                if x != T::zero() {
                    axpy(x, weight.row(w * c + ch), out);
                }
            }
        }
    }
    let mut q = pre.clone();
    q.as_mut_slice()
        .iter_mut()
        .for_each(|v| *v = v.max(T::zero()));
    Ok((pre, q))
}

/// `q_i = max(W_cᵀ [r_{i-t} ⊕ … ⊕ r_{i+t}] + b_c, 0)` with zeros outside the
/// sentence.
pub fn pwconv_forward<T: Scalar>(
    input: &Matrix<T>,
    weight: &Matrix<T>,
    bias: &[T],
    kernel_len: usize,
) -> Result<Matrix<T>> {
    pwconv_forward_with_pre(input, weight, bias, kernel_len).map(|(_, q)| q)
}

/// Gradient of the convolution given `∂L/∂q`. Returns `∂L/∂input` and
/// accumulates weight and bias gradients.
pub fn pwconv_backward<T: Scalar>(
    input: &Matrix<T>,
    pre: &Matrix<T>,
    d_out: &Matrix<T>,
    weight: &Matrix<T>,
    kernel_len: usize,
    d_weight: &mut Matrix<T>,
    d_bias: &mut [T],
) -> Matrix<T> {
    let (n, c) = input.shape();
    let half = kernel_len / 2;
    let mut d_input = Matrix::zeros(n, c);
    let mut d_pre = vec![T::zero(); pre.cols()];
    for i in 0..n {
        let mut active = false;
        for ((dp, &z), &g) in d_pre.iter_mut().zip(pre.row(i)).zip(d_out.row(i)) {
            *dp = if z > T::zero() { g } else { T::zero() };
            active |= *dp != T::zero();
        }
        if !active {
            continue;
        }
        axpy(T::one(), &d_pre, d_bias);
        for w in 0..kernel_len {
            let Some(j) = (i + w).checked_sub(half).filter(|&j| j < n) else {
                continue;
            };
            for ch in 0..c {
                let row = w * c + ch;
                let x = input.get(j, ch);
                if x != T::zero() {
                    axpy(x, &d_pre, d_weight.row_mut(row));
                }
                let dx = dot(weight.row(row), &d_pre);
                let slot = d_input.row_mut(j);
                slot[ch] = slot[ch] + dx;
            }
        }
    }
    d_input
}

/// Channel-wise maximum over all rows, with the winning row per channel.
/// Ties go to the smallest row index.
pub fn max_pool<T: Scalar>(q: &Matrix<T>) -> (Vec<T>, Vec<usize>) {
    max_pool_masked(q, q.rows())
}

/// Like [`max_pool`] but rows at or beyond `len` count as `-∞`.
pub fn max_pool_masked<T: Scalar>(q: &Matrix<T>, len: usize) -> (Vec<T>, Vec<usize>) {
    let c = q.cols();
    let mut best = vec![T::neg_infinity(); c];
    let mut arg = vec![0; c];
    for i in 0..q.rows() {
        if i >= len {
            continue;
        }
        for (j, &v) in q.row(i).iter().enumerate() {
            if v > best[j] {
                best[j] = v;
                arg[j] = i;
            }
        }
    }
    (best, arg)
}
