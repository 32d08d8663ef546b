use super::params::LstmParams;
use crate::scalar::Scalar;
use crate::tensor::{sigmoid, Matrix};

/// Activations of one LSTM direction, rows in processing order.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmCache<T> {
    /// `n × 4h`: post-activation input, forget, candidate and output gates.
    pub gates: Matrix<T>,
    /// `n × h`
    pub cells: Matrix<T>,
    /// `n × h`
    pub hidden: Matrix<T>,
}

/// Runs one direction over `inputs` from a zero state.
pub fn lstm_forward<T: Scalar>(params: &LstmParams<T>, inputs: &[&[T]]) -> LstmCache<T> {
    let h = params.hidden_dim();
    let n = inputs.len();
    let mut gates = Matrix::zeros(n, 4 * h);
    let mut cells = Matrix::zeros(n, h);
    let mut hidden = Matrix::zeros(n, h);
    let zeros = vec![T::zero(); h];
    let mut z = vec![T::zero(); 4 * h];

    for (t, x) in inputs.iter().enumerate() {
        z.copy_from_slice(&params.bias);
        params.w_input.matvec_acc(x, &mut z);
        {
            let h_prev = if t == 0 { &zeros[..] } else { hidden.row(t - 1) };
            params.w_hidden.matvec_acc(h_prev, &mut z);
        }
        let g = gates.row_mut(t);
        for k in 0..h {
            g[k] = sigmoid(z[k]);
            g[h + k] = sigmoid(z[h + k]);
            g[2 * h + k] = z[2 * h + k].tanh();
            g[3 * h + k] = sigmoid(z[3 * h + k]);
        }
        let g = gates.row(t).to_vec();
        let c_prev = if t == 0 { zeros.clone() } else { cells.row(t - 1).to_vec() };
        let c = cells.row_mut(t);
        for k in 0..h {
            c[k] = g[h + k] * c_prev[k] + g[k] * g[2 * h + k];
        }
        let c = cells.row(t).to_vec();
        let hr = hidden.row_mut(t);
        for k in 0..h {
            hr[k] = g[3 * h + k] * c[k].tanh();
        }
    }
    LstmCache { gates, cells, hidden }
}

/// Backpropagation through time for one direction.
///
/// `d_hidden` holds `∂L/∂h_t` from above, in processing order. Parameter
/// gradients are accumulated into `grads`; `∂L/∂x_t` is accumulated into
/// `d_inputs[t]`.
pub fn lstm_backward<T: Scalar>(
    params: &LstmParams<T>,
    inputs: &[&[T]],
    cache: &LstmCache<T>,
    d_hidden: &Matrix<T>,
    grads: &mut LstmParams<T>,
    d_inputs: &mut [Vec<T>],
) {
    let h = params.hidden_dim();
    let n = inputs.len();
    let zeros = vec![T::zero(); h];
    let mut dh_next = vec![T::zero(); h];
    let mut dc_next = vec![T::zero(); h];
    let mut dz = vec![T::zero(); 4 * h];
    let one = T::one();

    for t in (0..n).rev() {
        let g = cache.gates.row(t);
        let c = cache.cells.row(t);
        let c_prev = if t == 0 { &zeros[..] } else { cache.cells.row(t - 1) };
        let h_prev = if t == 0 { &zeros[..] } else { cache.hidden.row(t - 1) };
        let dh_up = d_hidden.row(t);
        for k in 0..h {
            let (i, f, cand, o) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
            let dh = dh_up[k] + dh_next[k];
            let tc = c[k].tanh();
            let d_o = dh * tc;
            let dc = dh * o * (one - tc * tc) + dc_next[k];
            let di = dc * cand;
            let dg = dc * i;
            let df = dc * c_prev[k];
            dc_next[k] = dc * f;
            dz[k] = di * i * (one - i);
            dz[h + k] = df * f * (one - f);
            dz[2 * h + k] = dg * (one - cand * cand);
            dz[3 * h + k] = d_o * o * (one - o);
        }
        grads.w_input.add_outer(&dz, inputs[t]);
        grads.w_hidden.add_outer(&dz, h_prev);
        for (b, &d) in grads.bias.iter_mut().zip(&dz) {
            *b = *b + d;
        }
        params.w_input.matvec_t_acc(&dz, &mut d_inputs[t]);
        dh_next.iter_mut().for_each(|v| *v = T::zero());
        params.w_hidden.matvec_t_acc(&dz, &mut dh_next);
    }
}

/// Bidirectional encoding: row `i` is `[forward h_i ; backward h_i]`.
pub fn bilstm_forward<T: Scalar>(
    embeddings: &Matrix<T>,
    forward: &LstmParams<T>,
    backward: &LstmParams<T>,
) -> Matrix<T> {
    let n = embeddings.rows();
    let h = forward.hidden_dim();
    let rows: Vec<&[T]> = (0..n).map(|i| embeddings.row(i)).collect();
    let reversed: Vec<&[T]> = rows.iter().rev().copied().collect();
    let fwd = lstm_forward(forward, &rows);
    let bwd = lstm_forward(backward, &reversed);
    let mut out = Matrix::zeros(n, 2 * h);
    for i in 0..n {
        let row = out.row_mut(i);
        row[..h].copy_from_slice(fwd.hidden.row(i));
        row[h..].copy_from_slice(bwd.hidden.row(n - 1 - i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_params_give_zero_states() {
        let p = LstmParams::<f64>::zeros(3, 2);
        let x = Matrix::from_rows(&[vec![1.0, -2.0, 3.0], vec![0.5, 0.5, 0.5]]);
        let out = bilstm_forward(&x, &p, &p);
        assert_eq!(out.shape(), (2, 4));
        assert!(out.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_token_runs_both_directions_on_it() {
        let mut p = LstmParams::<f64>::zeros(1, 1);
        p.bias = vec![1.0, 0.0, 0.5, 2.0];
        let x = Matrix::from_rows(&[vec![0.3]]);
        let out = bilstm_forward(&x, &p, &p);
        assert_eq!(out.shape(), (1, 2));
        assert_eq!(out.get(0, 0), out.get(0, 1));
        let expected = sigmoid(2.0) * (sigmoid(1.0) * 0.5f64.tanh()).tanh();
        assert!((out.get(0, 0) - expected).abs() < 1e-15);
    }
}
