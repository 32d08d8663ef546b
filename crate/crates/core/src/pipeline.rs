//! File-level glue: load a SemEval split with its optional parse, build the
//! vocabulary, load embeddings and encode examples.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use crate::corpus::{
    align_record, forest_for, load_embeddings_from_reader, parse_conllu, parse_semeval_xml,
    ConlluSentence, EmbeddingTable, Instance, Vocabulary,
};
use crate::error::{Error, Result};
use crate::proximity::ProximityMode;
use crate::scalar::Scalar;
use crate::train::{encode_instances, Example};

/// Aligned instances of one XML file, plus its CoNLL-U parse when given.
#[derive(Clone, Debug)]
pub struct Split {
    pub instances: Vec<Instance>,
    pub parses: Option<Vec<ConlluSentence>>,
}

impl Split {
    /// Parses and aligns. If `conllu` is present every instance must join
    /// its parse block.
    pub fn from_text(xml: &str, conllu: Option<&str>) -> Result<Self> {
        let instances = parse_semeval_xml(xml)?
            .iter()
            .map(align_record)
            .collect::<Result<Vec<_>>>()?;
        let parses = conllu.map(parse_conllu).transpose()?;
        if let Some(p) = &parses {
            for inst in &instances {
                forest_for(inst, p)?;
            }
        }
        Ok(Split { instances, parses })
    }

    pub fn load(xml: &Path, conllu: Option<&Path>) -> Result<Self> {
        let xml_text = read(xml)?;
        let conllu_text = conllu.map(read).transpose()?;
        Self::from_text(&xml_text, conllu_text.as_deref())
    }

    pub fn encode<T: Scalar>(&self, vocab: &Vocabulary, mode: ProximityMode) -> Result<Vec<Example<T>>> {
        if mode == ProximityMode::Dependency && self.parses.is_none() {
            return Err(Error::Argument(
                "dependency proximity requires a CoNLL-U parse".into(),
            ));
        }
        encode_instances(&self.instances, vocab, mode, self.parses.as_deref())
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Vocabulary over every token of the given splits, in order of appearance.
pub fn build_vocabulary(splits: &[&Split]) -> Vocabulary {
    Vocabulary::build(
        splits
            .iter()
            .flat_map(|s| s.instances.iter())
            .flat_map(|i| i.tokens.iter().map(String::as_str)),
    )
}

pub fn load_embedding_file<T: Scalar>(
    path: &Path,
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable<T>> {
    let file = fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    load_embeddings_from_reader(BufReader::with_capacity(1 << 20, file), vocab, dim, seed)
}
