//! Independent oracles and fixtures shared by the integration tests.
//!
//! Nothing here calls into the code path it is used to check: the LSTM
//! oracle is a straight-line recurrence, tree distances come from
//! Floyd–Warshall, gradients from central differences.

// Oracles index explicitly so they read like the formulas they check.
#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use pwcn::corpus::{DepForest, EmbeddingTable, Vocabulary};
use pwcn::nn::{forward, l2_penalty, HyperParams, LstmParams, ModelParams, SequenceInput};
use pwcn::proximity::position_proximity;
use pwcn::tensor::Matrix;
use pwcn::train::Example;
use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- trees

/// All-pairs shortest paths over undirected head links; `None` if
/// unreachable.
pub fn floyd_warshall(heads: &[Option<usize>]) -> Vec<Vec<Option<usize>>> {
    let n = heads.len();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        if let Some(h) = heads[i] {
            d[i][h] = 1;
            d[h][i] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect())
        .collect()
}

/// Tree distances to the aspect span computed from the all-pairs table.
pub fn oracle_distances(heads: &[Option<usize>], start: usize, len: usize) -> Vec<f64> {
    let n = heads.len();
    let all = floyd_warshall(heads);
    (0..n)
        .map(|i| {
            (start..start + len)
                .filter_map(|a| all[i][a])
                .min()
                .map_or(n as f64 / 2.0, |d| d as f64)
        })
        .collect()
}

/// Random forest of `n` nodes: each node attaches to an earlier node of a
/// random permutation, or becomes a new root with probability `root_p`.
pub fn random_forest(rng: &mut impl Rng, n: usize, root_p: f64) -> DepForest {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut heads = vec![None; n];
    for k in 1..n {
        if !rng.gen_bool(root_p) {
            heads[perm[k]] = Some(perm[rng.gen_range(0..k)]);
        }
    }
    DepForest::new(heads).expect("acyclic by construction")
}

pub fn random_span(rng: &mut impl Rng, n: usize) -> (usize, usize) {
    let start = rng.gen_range(0..n);
    let len = rng.gen_range(1..=n - start);
    (start, len)
}

// ---------------------------------------------------------------- position

/// Exact `(numerator, denominator)` of the position weight, by the three
/// literal cases.
pub fn position_fraction(n: usize, start: usize, len: usize, i: usize) -> (i64, i64) {
    let (n, t, m, i) = (n as i64, start as i64, len as i64, i as i64);
    if i < t {
        (n - (t - i), n)
    } else if i < t + m {
        (0, 1)
    } else {
        (n - (i - t - m + 1), n)
    }
}

// ---------------------------------------------------------------- LSTM

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One direction, written out gate by gate with explicit index arithmetic.
pub fn oracle_lstm(p: &LstmParams<f64>, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let h = p.w_hidden.cols();
    let d = p.w_input.cols();
    let mut h_prev = vec![0.0; h];
    let mut c_prev = vec![0.0; h];
    let mut out = Vec::new();
    for x in xs {
        let mut h_new = vec![0.0; h];
        let mut c_new = vec![0.0; h];
        for k in 0..h {
            let pre = |gate: usize| {
                let row = gate * h + k;
                let mut s = p.bias[row];
                for j in 0..d {
                    s += p.w_input.get(row, j) * x[j];
                }
                for j in 0..h {
                    s += p.w_hidden.get(row, j) * h_prev[j];
                }
                s
            };
            let input_gate = logistic(pre(0));
            let forget_gate = logistic(pre(1));
            let candidate = pre(2).tanh();
            let output_gate = logistic(pre(3));
            c_new[k] = forget_gate * c_prev[k] + input_gate * candidate;
            h_new[k] = output_gate * c_new[k].tanh();
        }
        out.push(h_new.clone());
        h_prev = h_new;
        c_prev = c_new;
    }
    out
}

pub fn oracle_bilstm(fwd: &LstmParams<f64>, bwd: &LstmParams<f64>, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let f = oracle_lstm(fwd, xs);
    let rev: Vec<Vec<f64>> = xs.iter().rev().cloned().collect();
    let b = oracle_lstm(bwd, &rev);
    let n = xs.len();
    (0..n)
        .map(|i| f[i].iter().chain(&b[n - 1 - i]).copied().collect())
        .collect()
}

// ---------------------------------------------------------------- pointwise

/// `max(W[c][j]·r[c] summed over c, plus b[j], 0)` channel by channel.
pub fn oracle_pointwise(r: &Matrix<f64>, w: &Matrix<f64>, b: &[f64]) -> Vec<Vec<f64>> {
    (0..r.rows())
        .map(|i| {
            (0..b.len())
                .map(|j| {
                    let mut acc = b[j];
                    for c in 0..r.cols() {
                        acc += r.get(i, c) * w.get(c, j);
                    }
                    if acc > 0.0 { acc } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- params

pub fn random_params(rng: &mut impl Rng, hyper: HyperParams, vocab: usize, range: f64) -> ModelParams<f64> {
    let mut p = ModelParams::zeros(hyper, vocab);
    let dist = Uniform::new(-range, range);
    for (k, t) in p.tensors_mut().into_iter().enumerate() {
        for (i, v) in t.iter_mut().enumerate() {
            // keep the padding row zero
            if k == 0 && i < hyper.embed_dim {
                continue;
            }
            *v = dist.sample(rng);
        }
    }
    p
}

// ---------------------------------------------------------------- gradients

/// Loss used by the finite-difference oracle: `-ln y[label] + λ Σ θ²`.
pub fn objective(params: &ModelParams<f64>, input: SequenceInput<'_, f64>, label: usize, lambda: f64) -> f64 {
    let trace = forward(params, input).expect("forward");
    -trace.probs[label].ln() + l2_penalty(params, lambda)
}

/// Central differences for every scalar parameter, in `tensors()` order.
pub fn numeric_gradient(
    params: &ModelParams<f64>,
    input: SequenceInput<'_, f64>,
    label: usize,
    lambda: f64,
    eps: f64,
) -> Vec<Vec<f64>> {
    let mut work = params.clone();
    let lens: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let mut out = Vec::with_capacity(lens.len());
    for (k, &len) in lens.iter().enumerate() {
        let mut g = vec![0.0; len];
        for i in 0..len {
            let orig = work.tensors()[k][i];
            work.tensors_mut()[k][i] = orig + eps;
            let up = objective(&work, input, label, lambda);
            work.tensors_mut()[k][i] = orig - eps;
            let down = objective(&work, input, label, lambda);
            work.tensors_mut()[k][i] = orig;
            g[i] = (up - down) / (2.0 * eps);
        }
        out.push(g);
    }
    out
}

/// `|a - b| / max(|a|, |b|, floor)`
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// True when every ReLU pre-activation is at least `margin` from zero and
/// every pooled channel with a positive maximum beats its runner-up by
/// `margin`, so small perturbations cannot flip a branch.
pub fn clear_of_kinks(params: &ModelParams<f64>, input: SequenceInput<'_, f64>, margin: f64) -> bool {
    let trace = forward(params, input).expect("forward");
    let len = trace.len;
    for i in 0..len {
        if trace.conv_pre.row(i).iter().any(|z| z.abs() < margin) {
            return false;
        }
    }
    for j in 0..trace.pooled.len() {
        let mut vals: Vec<f64> = (0..len).map(|i| trace.conv_out.get(i, j)).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if vals[0] > 0.0 && vals.len() > 1 && vals[0] - vals[1] < margin {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------- data

/// Random sentences of distinct token ids with position proximity.
pub fn synthetic_examples<T: pwcn::Scalar>(
    rng: &mut impl Rng,
    count: usize,
    vocab_size: usize,
    len_range: std::ops::RangeInclusive<usize>,
) -> Vec<Example<T>> {
    (0..count)
        .map(|k| {
            let n = rng.gen_range(len_range.clone());
            let tokens: Vec<usize> = (0..n).map(|_| rng.gen_range(2..vocab_size)).collect();
            let (start, len) = {
                let start = rng.gen_range(0..n);
                (start, 1 + rng.gen_range(0..(n - start).min(2)))
            };
            let proximity = position_proximity::<f64>(n, start, len)
                .unwrap()
                .iter()
                .map(|&p| T::from_f64(p).unwrap())
                .collect();
            Example {
                tokens,
                proximity,
                label: k % 3,
            }
        })
        .collect()
}

pub fn word_vocab(size: usize) -> Vocabulary {
    let words: Vec<String> = (2..size).map(|i| format!("w{i}")).collect();
    Vocabulary::build(words.iter().map(String::as_str))
}

pub fn random_embeddings<T: pwcn::Scalar>(vocab_size: usize, dim: usize, seed: u64) -> EmbeddingTable<T> {
    EmbeddingTable::random(vocab_size, dim, seed)
}

// ---------------------------------------------------------------- checks

/// Small random network plus one input, sampled until it is clear of ReLU
/// and max-pool kinks.
pub struct GradCase {
    pub params: ModelParams<f64>,
    pub tokens: Vec<usize>,
    pub proximity: Vec<f64>,
    pub label: usize,
    pub lambda: f64,
}

impl GradCase {
    pub fn input(&self) -> SequenceInput<'_, f64> {
        SequenceInput::new(&self.tokens, &self.proximity)
    }
}

pub const GRAD_VOCAB: usize = 9;

pub fn sample_grad_case(rng: &mut impl Rng, kernel_len: usize, use_tree: bool) -> GradCase {
    loop {
        let hyper = HyperParams {
            embed_dim: 4,
            hidden_dim: 4,
            num_classes: 3,
            kernel_len,
        };
        let params = random_params(rng, hyper, GRAD_VOCAB, 0.5);
        let n = rng.gen_range(1..=6);
        let tokens: Vec<usize> = (0..n).map(|_| rng.gen_range(1..GRAD_VOCAB)).collect();
        let (start, len) = random_span(rng, n);
        let proximity: Vec<f64> = if use_tree {
            let forest = random_forest(rng, n, 0.2);
            let d = pwcn::proximity::tree_distances::<f64>(&forest, start, len).unwrap();
            pwcn::proximity::dependency_proximity(&d, n, start, len).unwrap().into_inner()
        } else {
            position_proximity::<f64>(n, start, len).unwrap().into_inner()
        };
        let case = GradCase {
            params,
            tokens,
            proximity,
            label: rng.gen_range(0..3),
            lambda: rng.gen_range(0.0..1e-2),
        };
        if clear_of_kinks(&case.params, case.input(), 1e-3) {
            return case;
        }
    }
}

/// Worst relative error between analytic and central-difference gradients
/// over every parameter of `case`.
pub fn gradient_check(case: &GradCase, eps: f64, floor: f64) -> (f64, &'static str) {
    let trace = forward(&case.params, case.input()).unwrap();
    let analytic = pwcn::nn::backward(&case.params, &trace, case.label, case.lambda);
    let numeric = numeric_gradient(&case.params, case.input(), case.label, case.lambda, eps);
    let mut worst = (0.0, "");
    for (k, (a, n)) in analytic.tensors().iter().zip(&numeric).enumerate() {
        for (&x, &y) in a.iter().zip(n) {
            let e = relative_error(x, y, floor);
            if e > worst.0 {
                worst = (e, pwcn::nn::FIELD_NAMES[k]);
            }
        }
    }
    worst
}

/// The 20-instance memorization run: position mode, 50-dimensional
/// embeddings and hidden states, default optimizer settings.
pub fn overfit_run(seed: u64, epochs: usize) -> (Vec<f64>, pwcn::train::TrainOutcome<f32>) {
    use pwcn::train::{evaluate, init_params, train, TrainConfig};
    let vocab_size = 60;
    let mut r = rng(seed);
    let examples = synthetic_examples::<f32>(&mut r, 20, vocab_size, 4..=12);
    let config = TrainConfig {
        epochs,
        seed,
        embed_dim: 50,
        hidden_dim: 50,
        ..TrainConfig::default()
    };
    let emb = random_embeddings::<f32>(vocab_size, 50, seed);
    let params = init_params(config.hyper(), seed, &emb, config.init_range).unwrap();
    let mut train_acc = Vec::new();
    let outcome = train(&config, params, &examples, &examples, |_| {}).unwrap();
    train_acc.push(evaluate(&outcome.final_params, &examples, 64).unwrap().accuracy);
    train_acc.extend(outcome.log.iter().map(|r| r.test_accuracy));
    (train_acc, outcome)
}
