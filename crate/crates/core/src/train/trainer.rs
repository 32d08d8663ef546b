use rayon::prelude::*;

use super::adam::{adam_step, AdamState};
use super::batch::{epoch_seed, make_batches, Batch, Example};
use super::config::TrainConfig;
use super::metrics::EvalReport;
use crate::error::{Error, Result};
use crate::nn::{backward_into, forward, l2_penalty, Gradients, ModelParams};
use crate::scalar::{cast, Scalar};

/// Batch members per gradient accumulator. Fixed so the summation order,
/// and therefore the result, does not depend on the thread count.
pub const GRAD_CHUNK: usize = 8;

/// Summed cross-entropy gradient of a batch (no L2 term). Returns the summed
/// cross-entropy.
pub fn batch_gradient<T: Scalar>(
    params: &ModelParams<T>,
    batch: &Batch<T>,
    grads: &mut Gradients<T>,
) -> Result<T> {
    let rows: Vec<usize> = (0..batch.len()).collect();
    let partials: Vec<Result<(Gradients<T>, T)>> = rows
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut g = Gradients::zeros_like(params);
            let mut loss = T::zero();
            for &row in chunk {
                let trace = forward(params, batch.input(row))?;
                let label = batch.labels[row];
                loss = loss + trace.loss(label);
                backward_into(params, &trace, label, &mut g);
            }
            Ok((g, loss))
        })
        .collect();
    let mut total = T::zero();
    for part in partials {
        let (g, loss) = part?;
        grads.accumulate(&g);
        total = total + loss;
    }
    Ok(total)
}

/// One optimization step on `batch`; returns the batch objective
/// `Σ CE + λ Σ θ²` evaluated before the update.
pub fn train_step<T: Scalar>(
    params: &mut ModelParams<T>,
    state: &mut AdamState<T>,
    batch: &Batch<T>,
    config: &TrainConfig,
) -> Result<T> {
    let lambda: T = cast(config.l2);
    let mut grads = Gradients::zeros_like(params);
    let ce = batch_gradient(params, batch, &mut grads)?;
    grads.add_l2(params, lambda);
    let objective = ce + l2_penalty(params, lambda);
    let frozen: &[usize] = if config.train_embeddings { &[] } else { &[0] };
    adam_step(params, &grads, state, &config.adam(), frozen)?;
    Ok(objective)
}

/// Class distributions for `examples`, in order.
pub fn predict<T: Scalar>(
    params: &ModelParams<T>,
    examples: &[Example<T>],
    batch_size: usize,
) -> Result<Vec<Vec<T>>> {
    let batches = make_batches(examples, batch_size, None);
    let per_batch: Vec<Result<Vec<Vec<T>>>> = batches
        .par_iter()
        .map(|b| {
            (0..b.len())
                .map(|row| forward(params, b.input(row)).map(|t| t.probs))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(examples.len());
    for b in per_batch {
        out.extend(b?);
    }
    Ok(out)
}

pub fn evaluate<T: Scalar>(
    params: &ModelParams<T>,
    examples: &[Example<T>],
    batch_size: usize,
) -> Result<EvalReport> {
    if examples.is_empty() {
        return Err(Error::Data("evaluation set is empty".into()));
    }
    let probs = predict(params, examples, batch_size)?;
    let predicted: Vec<usize> = probs.iter().map(|y| argmax(y)).collect();
    let gold: Vec<usize> = examples.iter().map(|e| e.label).collect();
    Ok(EvalReport::from_predictions(
        &gold,
        &predicted,
        params.hyper.num_classes,
    ))
}

fn argmax<T: Scalar>(y: &[T]) -> usize {
    let mut best = 0;
    for (k, &v) in y.iter().enumerate() {
        if v > y[best] {
            best = k;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Epoch objective divided by the number of training instances.
    pub train_loss: f64,
    pub test_accuracy: f64,
    pub test_macro_f1: f64,
}

impl EpochRecord {
    /// `epoch<TAB>train_loss<TAB>test_acc<TAB>test_macro_f1`
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{:.6}\t{:.6}\t{:.6}",
            self.epoch, self.train_loss, self.test_accuracy, self.test_macro_f1
        )
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    /// Parameters from the epoch with the highest test accuracy (earliest on
    /// ties).
    pub best_params: ModelParams<T>,
    pub best_epoch: usize,
    pub best_report: EvalReport,
    pub final_params: ModelParams<T>,
    pub log: Vec<EpochRecord>,
}

/// Runs `config.epochs` epochs of Adam over shuffled batches, evaluating on
/// `test` after each. `on_epoch` sees every record as it is produced.
pub fn train<T: Scalar>(
    config: &TrainConfig,
    mut params: ModelParams<T>,
    train_set: &[Example<T>],
    test_set: &[Example<T>],
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    if test_set.is_empty() {
        return Err(Error::Data("test set is empty".into()));
    }
    let mut state = AdamState::new(&params);
    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(ModelParams<T>, usize, EvalReport)> = None;

    for epoch in 1..=config.epochs {
        let batches = make_batches(
            train_set,
            config.batch_size,
            Some(epoch_seed(config.seed, epoch)),
        );
        let mut total = 0.0;
        for batch in &batches {
            let objective = train_step(&mut params, &mut state, batch, config)?;
            total += objective.to_f64().unwrap_or(f64::NAN);
        }
        let report = evaluate(&params, test_set, config.batch_size)?;
        let record = EpochRecord {
            epoch,
            train_loss: total / train_set.len() as f64,
            test_accuracy: report.accuracy,
            test_macro_f1: report.macro_f1,
        };
        on_epoch(&record);
        log.push(record);
        if best
            .as_ref()
            .is_none_or(|(_, _, r)| report.accuracy > r.accuracy)
        {
            best = Some((params.clone(), epoch, report));
        }
    }

    let (best_params, best_epoch, best_report) = match best {
        Some(b) => b,
        None => {
            let report = evaluate(&params, test_set, config.batch_size)?;
            (params.clone(), 0, report)
        }
    };
    Ok(TrainOutcome {
        best_params,
        best_epoch,
        best_report,
        final_params: params,
        log,
    })
}
