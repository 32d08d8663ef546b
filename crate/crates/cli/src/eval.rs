use std::fs;
use std::path::Path;

use pwcn::checkpoint::Checkpoint;
use pwcn::pipeline::Split;
use pwcn::train::evaluate;
use pwcn::ProximityMode;

use crate::error::{io_at, CliError, CliResult};
use crate::EvalArgs;

pub const REPORT_FILE: &str = "eval_report.tsv";

pub fn run(args: EvalArgs) -> CliResult<()> {
    let ckpt = Checkpoint::load(&args.checkpoint)?;
    let vocab = crate::load_vocab(
        &crate::vocab_path(&args.checkpoint, args.vocab),
        &ckpt.meta,
    )?;
    let conllu = match ckpt.meta.mode {
        ProximityMode::Position => None,
        ProximityMode::Dependency => Some(args.conllu_test.as_deref().ok_or_else(|| {
            CliError::Usage("checkpoint uses dependency proximity; --conllu-test is required".into())
        })?),
    };
    let split = Split::load(&args.test_xml, conllu)?;
    let examples = split.encode::<f32>(&vocab, ckpt.meta.mode)?;
    let report = evaluate(&ckpt.params, &examples, 64)?;

    print!("{report}");
    let out = args.out_dir.unwrap_or_else(|| {
        args.checkpoint
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf()
    });
    fs::create_dir_all(&out).map_err(io_at(&out))?;
    let path = out.join(REPORT_FILE);
    fs::write(&path, report.to_kv_text()).map_err(io_at(&path))?;
    Ok(())
}
