use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use pwcn::checkpoint::{Checkpoint, CheckpointMeta};
use pwcn::corpus::class_distribution;
use pwcn::pipeline::{build_vocabulary, load_embedding_file, Split};
use pwcn::train::{init_params, train};
use pwcn::{Polarity, ProximityMode, TrainConfig};

use crate::error::{io_at, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::TrainArgs;

pub const CHECKPOINT_FILE: &str = "checkpoint.pwcn";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const LOG_FILE: &str = "epoch_log.tsv";
pub const MANIFEST_FILE: &str = "manifest.tsv";

pub const SEED_ENV: &str = "PWCN_SEED";

fn resolve_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn config_from(args: &TrainArgs) -> CliResult<TrainConfig> {
    let config = TrainConfig {
        learning_rate: args.lr,
        l2: args.l2,
        batch_size: args.batch_size,
        epochs: args.epochs,
        seed: resolve_seed(args.seed)?,
        mode: args.mode.into(),
        kernel_len: args.kernel,
        embed_dim: args.embed_dim,
        hidden_dim: args.hidden_dim,
        init_range: args.init_range,
        train_embeddings: !args.freeze_embeddings,
        ..TrainConfig::default()
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Data(format!("{}: no such file", path.display())))
    }
}

pub fn run(args: TrainArgs) -> CliResult<()> {
    let config = config_from(&args)?;
    let (conllu_train, conllu_test) = match config.mode {
        ProximityMode::Position => (None, None),
        ProximityMode::Dependency => match (&args.conllu_train, &args.conllu_test) {
            (Some(a), Some(b)) => (Some(a.as_path()), Some(b.as_path())),
            _ => {
                return Err(CliError::Usage(
                    "--mode dep requires both --conllu-train and --conllu-test".into(),
                ))
            }
        },
    };
    let inputs: Vec<(&str, &Path)> = [
        ("train_xml", Some(args.train_xml.as_path())),
        ("test_xml", Some(args.test_xml.as_path())),
        ("conllu_train", conllu_train),
        ("conllu_test", conllu_test),
        ("embeddings", Some(args.embeddings.as_path())),
    ]
    .into_iter()
    .filter_map(|(role, p)| p.map(|p| (role, p)))
    .collect();
    for (_, path) in &inputs {
        require_file(path)?;
    }

    let train_split = Split::load(&args.train_xml, conllu_train)?;
    let test_split = Split::load(&args.test_xml, conllu_test)?;
    let vocab = build_vocabulary(&[&train_split, &test_split]);
    let train_set = train_split.encode::<f32>(&vocab, config.mode)?;
    let test_set = test_split.encode::<f32>(&vocab, config.mode)?;
    let embeddings = load_embedding_file::<f32>(&args.embeddings, &vocab, config.embed_dim, config.seed)?;
    let params = init_params(config.hyper(), config.seed, &embeddings, config.init_range)?;

    let quiet = args.quiet;
    let epochs = config.epochs;
    let outcome = train(&config, params, &train_set, &test_set, |r| {
        if !quiet {
            eprintln!(
                "epoch {:>3}/{epochs}  loss {:.4}  test acc {:.4}  macro-F1 {:.4}",
                r.epoch, r.train_loss, r.test_accuracy, r.test_macro_f1
            );
        }
    })?;

    let out = &args.out_dir;
    fs::create_dir_all(out).map_err(io_at(out))?;
    let write = |name: &str, contents: String| -> CliResult<PathBuf> {
        let path = out.join(name);
        fs::write(&path, contents).map_err(io_at(&path))?;
        Ok(path)
    };

    let mut log = String::from("epoch\ttrain_loss\ttest_accuracy\ttest_macro_f1\n");
    for r in &outcome.log {
        log += &r.to_tsv();
        log.push('\n');
    }
    write(LOG_FILE, log)?;
    write(VOCAB_FILE, vocab.to_text())?;

    let mut extra = BTreeMap::new();
    extra.insert("best_epoch".to_owned(), outcome.best_epoch.to_string());
    let meta = CheckpointMeta {
        hyper: config.hyper(),
        vocab_size: vocab.len(),
        vocab_hash: vocab.content_hash(),
        mode: config.mode,
        seed: config.seed,
        extra,
    };
    let ckpt_path = out.join(CHECKPOINT_FILE);
    Checkpoint::new(meta, &outcome.best_params).save(&ckpt_path)?;

    let mut manifest = RunManifest::default();
    manifest.set("mode", config.mode);
    manifest.set("seed", config.seed);
    manifest.set("epochs", config.epochs);
    manifest.set("batch_size", config.batch_size);
    manifest.set("learning_rate", config.learning_rate);
    manifest.set("l2", config.l2);
    manifest.set("kernel_len", config.kernel_len);
    manifest.set("embed_dim", config.embed_dim);
    manifest.set("hidden_dim", config.hidden_dim);
    manifest.set("init_range", config.init_range);
    manifest.set("adam.beta1", config.beta1);
    manifest.set("adam.beta2", config.beta2);
    manifest.set("adam.epsilon", config.epsilon);
    manifest.set("train_embeddings", config.train_embeddings);
    manifest.set("vocab_size", vocab.len());
    manifest.set("vocab_hash", vocab.content_hash());
    manifest.set("embeddings.pretrained_rows", embeddings.pretrained_rows);
    for (name, split) in [("train", &train_split), ("test", &test_split)] {
        manifest.set(&format!("{name}.instances"), split.instances.len());
        let dist = class_distribution(&split.instances);
        for p in Polarity::ALL {
            manifest.set(&format!("{name}.class.{p}"), dist[p.index()]);
        }
    }
    for (role, path) in &inputs {
        manifest.input(role, path)?;
    }
    manifest.set("best_epoch", outcome.best_epoch);
    manifest.set("best_accuracy", format!("{:.6}", outcome.best_report.accuracy));
    manifest.set("best_macro_f1", format!("{:.6}", outcome.best_report.macro_f1));
    let manifest_path = out.join(MANIFEST_FILE);
    manifest.write(&manifest_path).map_err(io_at(&manifest_path))?;

    let last = outcome.log.last();
    println!(
        "best epoch {}: accuracy {:.4}  macro-F1 {:.4}",
        outcome.best_epoch, outcome.best_report.accuracy, outcome.best_report.macro_f1
    );
    if let Some(r) = last {
        println!(
            "final epoch {}: accuracy {:.4}  macro-F1 {:.4}",
            r.epoch, r.test_accuracy, r.test_macro_f1
        );
    }
    println!("checkpoint written to {}", ckpt_path.display());
    Ok(())
}
