use std::io::BufRead;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Vocabulary, PAD_INDEX};
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};
use crate::tensor::Matrix;

/// Half-width of the uniform range for words missing from the pretrained file.
pub const OOV_INIT_RANGE: f64 = 0.25;

/// `|V| × d_e` embedding matrix aligned with a [`Vocabulary`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable<T> {
    pub matrix: Matrix<T>,
    /// Rows filled from the pretrained file.
    pub pretrained_rows: usize,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Every row uniform in `(-OOV_INIT_RANGE, OOV_INIT_RANGE)` except padding.
    pub fn random(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut matrix = Matrix::zeros(vocab_size, dim);
        fill_oov(&mut matrix, &vec![false; vocab_size], seed);
        EmbeddingTable {
            matrix,
            pretrained_rows: 0,
        }
    }
}

fn fill_oov<T: Scalar>(matrix: &mut Matrix<T>, found: &[bool], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(-OOV_INIT_RANGE, OOV_INIT_RANGE);
    let bound: T = cast(OOV_INIT_RANGE);
    for (i, &hit) in found.iter().enumerate() {
        if hit || i == PAD_INDEX {
            continue;
        }
        for v in matrix.row_mut(i) {
            *v = loop {
                let x: T = cast(dist.sample(&mut rng));
                if x.abs() < bound {
                    break x;
                }
            };
        }
    }
}

/// Loads a whitespace-separated `word v1 ... v_d` text file.
///
/// Words are lowercased and the first occurrence wins. Rows for vocabulary
/// entries absent from the file are drawn from a seeded uniform
/// distribution; the padding row stays zero.
pub fn load_embeddings<T: Scalar>(
    text: &str,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable<T>> {
    load_embeddings_from_reader(text.as_bytes(), vocab, dim, seed)
}

pub fn load_embeddings_from_reader<T: Scalar, R: BufRead>(
    reader: R,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable<T>> {
    let mut matrix = Matrix::zeros(vocab.len(), dim);
    let mut found = vec![false; vocab.len()];
    let mut pretrained_rows = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let mut fields = line.split_ascii_whitespace();
        let Some(word) = fields.next() else { continue };
        let values: Vec<&str> = fields.collect();
        if values.len() != dim {
            return Err(Error::Format {
                line: lineno,
                message: format!("expected {dim} values, found {}", values.len()),
            });
        }
        let Some(idx) = vocab.get(word) else { continue };
        if found[idx] || idx == PAD_INDEX {
            continue;
        }
        let row = matrix.row_mut(idx);
        for (slot, raw) in row.iter_mut().zip(&values) {
            let v: f64 = raw.parse().map_err(|_| Error::Format {
                line: lineno,
                message: format!("bad float {raw:?}"),
            })?;
            *slot = cast(v);
        }
        found[idx] = true;
        pretrained_rows += 1;
    }

    fill_oov(&mut matrix, &found, seed);
    Ok(EmbeddingTable {
        matrix,
        pretrained_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copies_rows_from_file() {
        let vocab = Vocabulary::build(["food"]);
        let table: EmbeddingTable<f64> = load_embeddings("food 0.1 0.2\n", &vocab, 2, 0).unwrap();
        assert_eq!(table.matrix.row(vocab.lookup("food")), &[0.1, 0.2]);
        assert_eq!(table.pretrained_rows, 1);
    }

    #[test]
    fn missing_words_are_bounded_and_seeded() {
        let vocab = Vocabulary::build(["food", "service", "pizza"]);
        let a: EmbeddingTable<f32> = load_embeddings("food 1 2 3\n", &vocab, 3, 7).unwrap();
        let b: EmbeddingTable<f32> = load_embeddings("food 1 2 3\n", &vocab, 3, 7).unwrap();
        assert_eq!(a, b);
        for i in 1..vocab.len() {
            if i == vocab.lookup("food") {
                continue;
            }
            assert!(a.matrix.row(i).iter().all(|v| v.abs() < 0.25));
            assert!(a.matrix.row(i).iter().any(|&v| v != 0.0));
        }
        let c: EmbeddingTable<f32> = load_embeddings("food 1 2 3\n", &vocab, 3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn padding_row_is_zero() {
        let vocab = Vocabulary::build(["x"]);
        let t: EmbeddingTable<f64> = load_embeddings("", &vocab, 4, 1).unwrap();
        assert!(t.matrix.row(PAD_INDEX).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wrong_arity_reports_line() {
        let vocab = Vocabulary::build(["x"]);
        let err = load_embeddings::<f64>("x 1 2\ny 1\n", &vocab, 2, 1).unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
    }

    #[test]
    fn first_occurrence_wins_case_insensitively() {
        let vocab = Vocabulary::build(["the"]);
        let t: EmbeddingTable<f64> = load_embeddings("The 1\nthe 2\n", &vocab, 1, 1).unwrap();
        assert_eq!(t.matrix.row(2), &[1.0]);
    }
}
