use std::fmt::Write as _;

use super::{DepForest, Instance};
use crate::error::{Error, Result};

/// One CoNLL-U sentence block, reduced to the columns the model consumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConlluSentence {
    /// Value of a `# sent_id = ...` comment, if present.
    pub sent_id: Option<String>,
    pub forms: Vec<String>,
    pub forest: DepForest,
}

/// Parses CoNLL-U text. Only ID, FORM and HEAD are read; comment lines,
/// multiword ranges (`1-2`) and empty nodes (`1.1`) are skipped.
pub fn parse_conllu(text: &str) -> Result<Vec<ConlluSentence>> {
    let mut out = Vec::new();
    let mut sent_id = None;
    let mut forms = Vec::new();
    let mut heads = Vec::new();
    let mut block_start = 1;

    let finish = |sent_id: &mut Option<String>,
                  forms: &mut Vec<String>,
                  heads: &mut Vec<usize>,
                  out: &mut Vec<ConlluSentence>,
                  block_start: usize|
     -> Result<()> {
        if forms.is_empty() {
            sent_id.take();
            return Ok(());
        }
        let forest = DepForest::from_conllu_heads(heads).map_err(|e| match e {
            Error::Structure(msg) => Error::Structure(format!(
                "sentence starting at line {block_start}: {msg}"
            )),
            other => other,
        })?;
        out.push(ConlluSentence {
            sent_id: sent_id.take(),
            forms: std::mem::take(forms),
            forest,
        });
        heads.clear();
        Ok(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut sent_id, &mut forms, &mut heads, &mut out, block_start)?;
            block_start = lineno + 1;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    sent_id = Some(value.trim().to_owned());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::Format {
                line: lineno,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let id: usize = id.parse().map_err(|_| Error::Format {
            line: lineno,
            message: format!("bad token id {id:?}"),
        })?;
        if id != forms.len() + 1 {
            return Err(Error::Format {
                line: lineno,
                message: format!("token id {id} out of sequence"),
            });
        }
        let head: usize = cols[6].parse().map_err(|_| Error::Format {
            line: lineno,
            message: format!("bad head {:?}", cols[6]),
        })?;
        forms.push(cols[1].to_owned());
        heads.push(head);
    }
    finish(&mut sent_id, &mut forms, &mut heads, &mut out, block_start)?;
    Ok(out)
}

/// Writes sentences as 10-column CoNLL-U with unused columns set to `_`.
pub fn serialize_conllu(sentences: &[ConlluSentence]) -> String {
    let mut s = String::new();
    for sent in sentences {
        if let Some(id) = &sent.sent_id {
            let _ = writeln!(s, "# sent_id = {id}");
        }
        for (i, form) in sent.forms.iter().enumerate() {
            let head = sent.forest.head(i).map_or(0, |h| h + 1);
            let deprel = if head == 0 { "root" } else { "dep" };
            let _ = writeln!(s, "{}\t{form}\t_\t_\t_\t_\t{head}\t{deprel}\t_\t_", i + 1);
        }
        s.push('\n');
    }
    s
}

/// Finds the parse for an instance by sentence position and checks that it
/// covers the same tokens.
pub fn forest_for<'a>(instance: &Instance, sentences: &'a [ConlluSentence]) -> Result<&'a DepForest> {
    let sent = sentences.get(instance.sentence_index).ok_or_else(|| {
        Error::alignment(
            &instance.sentence_id,
            format!(
                "no CoNLL-U block at position {} ({} blocks)",
                instance.sentence_index,
                sentences.len()
            ),
        )
    })?;
    if let Some(id) = &sent.sent_id {
        if id != &instance.sentence_id {
            return Err(Error::alignment(
                &instance.sentence_id,
                format!("CoNLL-U block carries sent_id {id}"),
            ));
        }
    }
    if sent.forms.len() != instance.len() {
        return Err(Error::alignment(
            &instance.sentence_id,
            format!(
                "CoNLL-U block has {} tokens, sentence has {}",
                sent.forms.len(),
                instance.len()
            ),
        ));
    }
    if let Some((i, (form, tok))) = sent
        .forms
        .iter()
        .zip(&instance.tokens)
        .enumerate()
        .find(|(_, (f, t))| f != t)
    {
        return Err(Error::alignment(
            &instance.sentence_id,
            format!("token {i}: CoNLL-U form {form:?} differs from {tok:?}"),
        ));
    }
    Ok(&sent.forest)
}
