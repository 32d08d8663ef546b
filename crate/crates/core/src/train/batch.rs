use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{forest_for, ConlluSentence, Instance, Vocabulary, PAD_INDEX};
use crate::error::Result;
use crate::nn::SequenceInput;
use crate::proximity::{proximity_for, ProximityMode};
use crate::scalar::Scalar;

/// A model-ready instance: token indices, proximity weights and label.
#[derive(Clone, Debug, PartialEq)]
pub struct Example<T> {
    pub tokens: Vec<usize>,
    pub proximity: Vec<T>,
    pub label: usize,
}

impl<T: Scalar> Example<T> {
    pub fn input(&self) -> SequenceInput<'_, T> {
        SequenceInput::new(&self.tokens, &self.proximity)
    }
}

/// Encodes tokens and computes proximity for every instance. Dependency mode
/// needs the parsed sentences of the same file.
pub fn encode_instances<T: Scalar>(
    instances: &[Instance],
    vocab: &Vocabulary,
    mode: ProximityMode,
    parses: Option<&[ConlluSentence]>,
) -> Result<Vec<Example<T>>> {
    instances
        .iter()
        .map(|inst| {
            let forest = match (mode, parses) {
                (ProximityMode::Dependency, Some(p)) => Some(forest_for(inst, p)?),
                _ => None,
            };
            let proximity = proximity_for::<f64>(inst, mode, forest)?
                .iter()
                .map(|&p| T::from_f64(p).unwrap_or_else(T::nan))
                .collect();
            Ok(Example {
                tokens: vocab.encode(&inst.tokens),
                proximity,
                label: inst.label.index(),
            })
        })
        .collect()
}

/// Padded mini-batch. Rows are padded with [`PAD_INDEX`] and zero proximity
/// up to the longest member.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch<T> {
    /// Positions of the members in the source slice.
    pub indices: Vec<usize>,
    pub tokens: Vec<Vec<usize>>,
    pub proximity: Vec<Vec<T>>,
    pub lengths: Vec<usize>,
    pub labels: Vec<usize>,
}

impl<T: Scalar> Batch<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn padded_len(&self) -> usize {
        self.tokens.first().map_or(0, Vec::len)
    }

    /// True for real tokens, false for padding.
    pub fn mask(&self, row: usize, pos: usize) -> bool {
        pos < self.lengths[row]
    }

    pub fn input(&self, row: usize) -> SequenceInput<'_, T> {
        SequenceInput {
            tokens: &self.tokens[row],
            proximity: &self.proximity[row],
            len: self.lengths[row],
        }
    }

    pub fn from_examples(examples: &[Example<T>], indices: Vec<usize>) -> Self {
        let width = indices
            .iter()
            .map(|&i| examples[i].tokens.len())
            .max()
            .unwrap_or(0);
        let mut batch = Batch {
            tokens: Vec::with_capacity(indices.len()),
            proximity: Vec::with_capacity(indices.len()),
            lengths: Vec::with_capacity(indices.len()),
            labels: Vec::with_capacity(indices.len()),
            indices,
        };
        for &i in &batch.indices {
            let ex = &examples[i];
            let mut toks = ex.tokens.clone();
            toks.resize(width, PAD_INDEX);
            let mut prox = ex.proximity.clone();
            prox.resize(width, T::zero());
            batch.tokens.push(toks);
            batch.proximity.push(prox);
            batch.lengths.push(ex.tokens.len());
            batch.labels.push(ex.label);
        }
        batch
    }
}

/// Shuffling seed for a given epoch.
pub fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    seed.wrapping_add(epoch as u64)
}

/// Splits `examples` into padded batches, shuffled when `shuffle_seed` is
/// given and in order otherwise.
pub fn make_batches<T: Scalar>(
    examples: &[Example<T>],
    batch_size: usize,
    shuffle_seed: Option<u64>,
) -> Vec<Batch<T>> {
    let mut order: Vec<usize> = (0..examples.len()).collect();
    if let Some(seed) = shuffle_seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order
        .chunks(batch_size.max(1))
        .map(|idx| Batch::from_examples(examples, idx.to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(n: usize) -> Example<f64> {
        Example {
            tokens: vec![2; n],
            proximity: vec![0.5; n],
            label: 0,
        }
    }

    #[test]
    fn batch_sizes() {
        let examples: Vec<_> = (0..130).map(|i| ex(1 + i % 7)).collect();
        let sizes: Vec<usize> = make_batches(&examples, 64, Some(3)).iter().map(Batch::len).collect();
        assert_eq!(sizes, [64, 64, 2]);
    }

    #[test]
    fn single_member_not_padded() {
        let b = make_batches(&[ex(4)], 64, None);
        assert_eq!(b[0].padded_len(), 4);
        assert!((0..4).all(|j| b[0].mask(0, j)));
    }

    #[test]
    fn padding_uses_pad_index_and_zero_weight() {
        let b = make_batches(&[ex(2), ex(5)], 8, None);
        assert_eq!(b[0].tokens[0], vec![2, 2, 0, 0, 0]);
        assert_eq!(b[0].proximity[0], vec![0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!(!b[0].mask(0, 2));
        assert_eq!(b[0].lengths, vec![2, 5]);
    }

    #[test]
    fn shuffle_depends_on_seed_only() {
        let examples: Vec<_> = (0..50).map(|i| ex(1 + i % 3)).collect();
        let a = make_batches(&examples, 10, Some(epoch_seed(1, 0)));
        let b = make_batches(&examples, 10, Some(epoch_seed(1, 0)));
        let c = make_batches(&examples, 10, Some(epoch_seed(1, 1)));
        assert_eq!(a, b);
        assert_ne!(a[0].indices, c[0].indices);
        let mut all: Vec<usize> = a.iter().flat_map(|b| b.indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..50).collect::<Vec<_>>());
    }
}
