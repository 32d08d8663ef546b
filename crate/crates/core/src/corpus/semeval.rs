use roxmltree::{Document, Node};

use super::Polarity;
use crate::error::{Error, Result};

/// One `aspectTerm` together with its sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspectRecord {
    pub sentence_id: String,
    pub sentence_index: usize,
    pub text: String,
    pub term: String,
    /// Character offsets, `from` inclusive and `to` exclusive.
    pub from: usize,
    pub to: usize,
    pub label: Polarity,
}

/// Reads SemEval-2014 Task 4 XML into one record per aspect term.
///
/// Terms labeled `conflict` are skipped. Every `from`/`to` pair must slice
/// exactly the `term` attribute out of the sentence text.
pub fn parse_semeval_xml(xml: &str) -> Result<Vec<AspectRecord>> {
    let doc = Document::parse(xml).map_err(|e| Error::Xml {
        line: e.pos().row,
        message: e.to_string(),
    })?;
    let line_of = |node: Node| doc.text_pos_at(node.range().start).row;

    let mut records = Vec::new();
    let sentences = doc
        .descendants()
        .filter(|n| n.has_tag_name("sentence"));
    for (sentence_index, sentence) in sentences.enumerate() {
        let sentence_id = sentence
            .attribute("id")
            .map(str::to_owned)
            .unwrap_or_else(|| format!("#{sentence_index}"));
        let text: String = sentence
            .children()
            .find(|n| n.has_tag_name("text"))
            .and_then(|n| n.text())
            .ok_or_else(|| Error::Xml {
                line: line_of(sentence),
                message: format!("sentence {sentence_id} has no <text>"),
            })?
            .to_owned();
        let chars: Vec<char> = text.chars().collect();

        let terms = sentence
            .children()
            .filter(|n| n.has_tag_name("aspectTerms"))
            .flat_map(|n| n.children().filter(|c| c.has_tag_name("aspectTerm")));
        for term_node in terms {
            let attr = |name: &str| {
                term_node.attribute(name).ok_or_else(|| Error::Xml {
                    line: line_of(term_node),
                    message: format!("aspectTerm in sentence {sentence_id} lacks `{name}`"),
                })
            };
            let polarity = attr("polarity")?;
            if polarity == "conflict" {
                continue;
            }
            let label: Polarity = polarity.parse()?;
            let term = attr("term")?.to_owned();
            let parse_offset = |name: &str| -> Result<usize> {
                attr(name)?.trim().parse().map_err(|_| Error::Xml {
                    line: line_of(term_node),
                    message: format!("non-numeric `{name}` in sentence {sentence_id}"),
                })
            };
            let from = parse_offset("from")?;
            let to = parse_offset("to")?;
            if from > to || to > chars.len() {
                return Err(Error::alignment(
                    &sentence_id,
                    format!("span {from}..{to} outside sentence of {} chars", chars.len()),
                ));
            }
            let sliced: String = chars[from..to].iter().collect();
            if sliced != term {
                return Err(Error::alignment(
                    &sentence_id,
                    format!("span {from}..{to} reads {sliced:?}, term is {term:?}"),
                ));
            }
            records.push(AspectRecord {
                sentence_id: sentence_id.clone(),
                sentence_index,
                text: text.clone(),
                term,
                from,
                to,
                label,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_CASE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<sentences>
    <sentence id="42">
        <text>great food but the service was dreadful!</text>
        <aspectTerms>
            <aspectTerm term="food" polarity="positive" from="6" to="10"/>
        </aspectTerms>
    </sentence>
</sentences>"#;

    #[test]
    fn single_aspect() {
        let recs = parse_semeval_xml(TABLE_CASE).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].from, recs[0].to), (6, 10));
        assert_eq!(recs[0].label, Polarity::Positive);
        assert_eq!(recs[0].sentence_id, "42");
    }

    #[test]
    fn sentence_without_aspects_yields_nothing() {
        let xml = r#"<sentences><sentence id="1"><text>Nothing to see.</text></sentence></sentences>"#;
        assert!(parse_semeval_xml(xml).unwrap().is_empty());
    }

    #[test]
    fn two_aspects_share_sentence() {
        let xml = r#"<sentences>
  <sentence id="s1">
    <text>Its size is ideal and the weight is acceptable.</text>
    <aspectTerms>
      <aspectTerm term="size" polarity="positive" from="4" to="8"/>
      <aspectTerm term="weight" polarity="positive" from="26" to="32"/>
    </aspectTerms>
  </sentence>
</sentences>"#;
        let recs = parse_semeval_xml(xml).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].text, recs[1].text);
        assert_eq!(recs[1].term, "weight");
    }

    #[test]
    fn conflict_is_dropped() {
        let xml = r#"<sentences><sentence id="1"><text>ok food</text><aspectTerms>
<aspectTerm term="food" polarity="conflict" from="3" to="7"/></aspectTerms></sentence></sentences>"#;
        assert!(parse_semeval_xml(xml).unwrap().is_empty());
    }

    #[test]
    fn misaligned_offsets_name_sentence() {
        let xml = r#"<sentences><sentence id="bad-7"><text>ok food</text><aspectTerms>
<aspectTerm term="food" polarity="neutral" from="2" to="6"/></aspectTerms></sentence></sentences>"#;
        match parse_semeval_xml(xml) {
            Err(Error::Alignment { sentence_id, .. }) => assert_eq!(sentence_id, "bad-7"),
            other => panic!("expected alignment error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_xml_reports_line() {
        let xml = "<sentences>\n<sentence id=\"1\">\n<text>x</txt>\n</sentences>";
        match parse_semeval_xml(xml) {
            Err(Error::Xml { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected xml error, got {other:?}"),
        }
    }

    #[test]
    fn offsets_count_characters_not_bytes() {
        let xml = r#"<sentences><sentence id="u"><text>café food</text><aspectTerms>
<aspectTerm term="food" polarity="negative" from="5" to="9"/></aspectTerms></sentence></sentences>"#;
        let recs = parse_semeval_xml(xml).unwrap();
        assert_eq!(recs[0].term, "food");
    }
}
