use std::io::IsTerminal;

use pwcn::checkpoint::Checkpoint;
use pwcn::corpus::{parse_conllu, tokenize_and_align, DepForest};
use pwcn::nn::{forward, SequenceInput};
use pwcn::proximity::proximity_for;
use pwcn::{Instance, Polarity, ProximityMode};

use crate::error::{io_at, CliError, CliResult};
use crate::{heatmap, ColorChoice, ExplainArgs};

/// Aligns the first occurrence of `aspect` in `sentence` to tokens.
pub fn locate(sentence: &str, aspect: &str) -> CliResult<Instance> {
    let missing = || CliError::Data(format!("aspect {aspect:?} not found in sentence {sentence:?}"));
    if aspect.trim().is_empty() {
        return Err(missing());
    }
    let byte = sentence.find(aspect).ok_or_else(missing)?;
    let from = sentence[..byte].chars().count();
    let to = from + aspect.chars().count();
    // The label is irrelevant here; prediction ignores it.
    tokenize_and_align(sentence, (from, to), Polarity::Neutral, "explain").map_err(CliError::from)
}

/// Reads the CoNLL-U file and picks the first block whose forms equal the
/// sentence tokens.
fn parse_for(path: &std::path::Path, tokens: &[String]) -> CliResult<DepForest> {
    let text = std::fs::read_to_string(path).map_err(io_at(path))?;
    parse_conllu(&text)?
        .into_iter()
        .find(|s| s.forms == tokens)
        .map(|s| s.forest)
        .ok_or_else(|| {
            CliError::Data(format!(
                "{}: no block with tokens {:?}",
                path.display(),
                tokens.join(" ")
            ))
        })
}

pub fn run(args: ExplainArgs) -> CliResult<()> {
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let vocab = crate::load_vocab(
        &crate::vocab_path(&args.checkpoint, args.vocab),
        &ckpt.meta,
    )?;
    let instance = locate(&args.sentence, &args.aspect)?;
    let mode = ckpt.meta.mode;
    // Position mode never opens the parse file, even when one is passed.
    let forest = match mode {
        ProximityMode::Position => None,
        ProximityMode::Dependency => {
            let path = args.conllu.as_deref().ok_or_else(|| {
                CliError::Usage("checkpoint uses dependency proximity; --conllu is required".into())
            })?;
            Some(parse_for(path, &instance.tokens)?)
        }
    };
    let weights = proximity_for::<f64>(&instance, mode, forest.as_ref())?.into_inner();
    let model_weights: Vec<f32> = weights.iter().map(|&w| w as f32).collect();
    let ids = vocab.encode(&instance.tokens);
    let trace = forward(&ckpt.params, SequenceInput::new(&ids, &model_weights))?;
    let predicted = Polarity::from_index(trace.prediction())
        .map_or_else(|| trace.prediction().to_string(), |p| p.to_string());

    let aspect = instance.aspect_start..instance.aspect_end();
    println!("mode\t{mode}");
    println!("aspect\t{}", instance.aspect_tokens().join(" "));
    println!("prediction\t{predicted}");
    for (p, prob) in Polarity::ALL.iter().zip(&trace.probs) {
        println!("prob.{p}\t{prob:.4}");
    }
    println!();
    println!("index\ttoken\tweight");
    for (i, (tok, w)) in instance.tokens.iter().zip(&weights).enumerate() {
        let mark = if aspect.contains(&i) { "\taspect" } else { "" };
        println!("{i}\t{tok}\t{w}{mark}");
    }
    println!();
    let shades = heatmap::shades(&weights, aspect);
    let color = match args.color {
        ColorChoice::Always => true,
        ColorChoice::Never => false,
        ColorChoice::Auto => std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none(),
    };
    if color {
        println!("{}", heatmap::ansi(&instance.tokens, &shades));
    } else {
        println!("{}", heatmap::plain(&instance.tokens, &shades));
    }
    if let Some(path) = &args.html {
        let caption = format!("aspect: {} | mode: {mode} | prediction: {predicted}", args.aspect);
        std::fs::write(path, heatmap::html(&instance.tokens, &shades, &weights, &caption))
            .map_err(io_at(path))?;
    }
    Ok(())
}
