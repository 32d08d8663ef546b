//! Data ingestion: SemEval-2014 aspect-term XML, CoNLL-U dependency parses
//! and pretrained embedding text files.

mod conllu;
mod embeddings;
mod forest;
mod semeval;
mod tokenize;
mod vocab;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use conllu::{forest_for, parse_conllu, serialize_conllu, ConlluSentence};
pub use embeddings::{load_embeddings, load_embeddings_from_reader, EmbeddingTable, OOV_INIT_RANGE};
pub use forest::DepForest;
pub use semeval::{parse_semeval_xml, AspectRecord};
pub use tokenize::{align_record, tokenize, tokenize_and_align, Token};
pub use vocab::{Vocabulary, PAD_INDEX, UNK_INDEX};

/// Three-way sentiment label. `conflict` aspects are dropped at parse time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Negative, Polarity::Neutral, Polarity::Positive];
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Polarity> {
        Polarity::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Positive => "positive",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            "positive" => Ok(Polarity::Positive),
            other => Err(Error::Data(format!("unknown polarity {other:?}"))),
        }
    }
}

/// One labeled aspect occurrence, tokenized.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub tokens: Vec<String>,
    /// Index of the first aspect token.
    pub aspect_start: usize,
    /// Number of aspect tokens, at least one.
    pub aspect_len: usize,
    pub label: Polarity,
    pub sentence_id: String,
    /// Position of the source sentence in its XML file; CoNLL-U blocks are
    /// joined on this.
    pub sentence_index: usize,
    /// Character offsets of the aspect term in the raw sentence.
    pub char_span: (usize, usize),
}

impl Instance {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn aspect_end(&self) -> usize {
        self.aspect_start + self.aspect_len
    }

    pub fn aspect_tokens(&self) -> &[String] {
        &self.tokens[self.aspect_start..self.aspect_end()]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tokens.len();
        if n == 0 || self.aspect_len == 0 || self.aspect_end() > n {
            return Err(Error::alignment(
                &self.sentence_id,
                format!(
                    "invalid aspect span start={} len={} for {} tokens",
                    self.aspect_start, self.aspect_len, n
                ),
            ));
        }
        if let Some(bad) = self
            .tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::alignment(
                &self.sentence_id,
                format!("malformed token {bad:?}"),
            ));
        }
        Ok(())
    }
}

/// Label counts in `Polarity::ALL` order.
pub fn class_distribution(instances: &[Instance]) -> [usize; Polarity::COUNT] {
    let mut counts = [0; Polarity::COUNT];
    for inst in instances {
        counts[inst.label.index()] += 1;
    }
    counts
}
