use super::{AspectRecord, Instance, Polarity};
use crate::error::{Error, Result};

/// A token with its character (not byte) offsets in the source sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '‘' | '’' | '“' | '”' | '–' | '—' | '…' | '«' | '»' | '¡' | '¿' | '´'
        )
}

/// Splits on whitespace and emits every punctuation character as its own
/// token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;

    let flush = |current: &mut String, start: usize, end: usize, out: &mut Vec<Token>| {
        if !current.is_empty() {
            out.push(Token {
                text: std::mem::take(current),
                char_start: start,
                char_end: end,
            });
        }
    };

    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            flush(&mut current, start, i, &mut tokens);
        } else if is_punct(c) {
            flush(&mut current, start, i, &mut tokens);
            tokens.push(Token {
                text: c.to_string(),
                char_start: i,
                char_end: i + 1,
            });
        } else {
            if current.is_empty() {
                start = i;
            }
            current.push(c);
        }
    }
    let end = text.chars().count();
    flush(&mut current, start, end, &mut tokens);
    tokens
}

/// Tokenizes `raw` and locates the aspect as the minimal token range that
/// covers the character span `[from, to)`.
pub fn tokenize_and_align(
    raw: &str,
    span: (usize, usize),
    label: Polarity,
    sentence_id: &str,
) -> Result<Instance> {
    let (from, to) = span;
    let tokens = tokenize(raw);
    let covered: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.char_start < to && t.char_end > from)
        .map(|(i, _)| i)
        .collect();
    let (Some(&first), Some(&last)) = (covered.first(), covered.last()) else {
        return Err(Error::alignment(
            sentence_id,
            format!("character span {from}..{to} covers no token"),
        ));
    };
    let inst = Instance {
        tokens: tokens.into_iter().map(|t| t.text).collect(),
        aspect_start: first,
        aspect_len: last - first + 1,
        label,
        sentence_id: sentence_id.to_owned(),
        sentence_index: 0,
        char_span: span,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn align_record(record: &AspectRecord) -> Result<Instance> {
    let mut inst = tokenize_and_align(
        &record.text,
        (record.from, record.to),
        record.label,
        &record.sentence_id,
    )?;
    inst.sentence_index = record.sentence_index;
    Ok(inst)
}
