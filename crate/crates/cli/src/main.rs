//! `pwcn` command-line tool: train, evaluate and explain the aspect
//! sentiment classifier.
//!
//! Exit codes: 0 on success, 1 on data or format errors, 2 on usage errors.

mod error;
mod eval;
mod explain;
mod heatmap;
mod manifest;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pwcn::ProximityMode;

use error::CliResult;

#[derive(Parser)]
#[command(name = "pwcn", version, about = "Proximity-weighted convolution network for aspect sentiment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a SemEval-style XML split and evaluate on another after each epoch.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a test split.
    Eval(EvalArgs),
    /// Show proximity weights and the prediction for one sentence.
    Explain(ExplainArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pos,
    Dep,
}

impl From<Mode> for ProximityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Pos => ProximityMode::Position,
            Mode::Dep => ProximityMode::Dependency,
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    train_xml: PathBuf,
    #[arg(long)]
    test_xml: PathBuf,
    /// Parse of the training XML; required with `--mode dep`.
    #[arg(long)]
    conllu_train: Option<PathBuf>,
    /// Parse of the test XML; required with `--mode dep`.
    #[arg(long)]
    conllu_test: Option<PathBuf>,
    /// Whitespace-separated `word v1 … vd` lines.
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    /// Overridden by the PWCN_SEED environment variable.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Convolution window; 1 gives the point-wise variant.
    #[arg(long, default_value_t = 3)]
    kernel: usize,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 1e-5)]
    l2: f64,
    #[arg(long, default_value_t = 300)]
    embed_dim: usize,
    #[arg(long, default_value_t = 300)]
    hidden_dim: usize,
    /// Half-width of the uniform initialisation of non-embedding weights.
    #[arg(long, default_value_t = 0.01)]
    init_range: f64,
    #[arg(long)]
    freeze_embeddings: bool,
    /// Suppress per-epoch progress on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    test_xml: PathBuf,
    /// Required when the checkpoint was trained with dependency proximity.
    #[arg(long)]
    conllu_test: Option<PathBuf>,
    /// Defaults to `vocab.txt` next to the checkpoint.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Where `eval_report.tsv` goes; defaults to the checkpoint's directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorChoice {
    Auto,
    Always,
    Never,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    sentence: String,
    /// Substring of the sentence; its first occurrence is used.
    #[arg(long)]
    aspect: String,
    /// CoNLL-U file holding a parse of the sentence (dependency checkpoints
    /// only). The first block whose forms match the tokens is used.
    #[arg(long)]
    conllu: Option<PathBuf>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Also write the heatmap as an HTML page.
    #[arg(long)]
    html: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ColorChoice::Auto)]
    color: ColorChoice,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train(a) => train::run(a),
        Command::Eval(a) => eval::run(a),
        Command::Explain(a) => explain::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// `vocab.txt` beside the checkpoint unless given explicitly.
fn vocab_path(checkpoint: &std::path::Path, explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(|| {
        checkpoint
            .parent()
            .unwrap_or_else(|| std::path::Path::new("."))
            .join(train::VOCAB_FILE)
    })
}

/// Loads a vocabulary file and checks it against the checkpoint metadata.
fn load_vocab(path: &std::path::Path, meta: &pwcn::checkpoint::CheckpointMeta) -> CliResult<pwcn::Vocabulary> {
    let text = std::fs::read_to_string(path).map_err(error::io_at(path))?;
    let vocab = pwcn::Vocabulary::from_text(&text)?;
    let hash = vocab.content_hash();
    if hash != meta.vocab_hash || vocab.len() != meta.vocab_size {
        return Err(error::CliError::Data(format!(
            "vocabulary {} does not match the checkpoint (hash {hash}, {} entries; checkpoint expects {}, {} entries)",
            path.display(),
            vocab.len(),
            meta.vocab_hash,
            meta.vocab_size
        )));
    }
    Ok(vocab)
}
