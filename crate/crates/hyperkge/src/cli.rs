//! Command-line front end.

use std::fs;
use std::io::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperkge_core::eval::parameter_count_for;
use hyperkge_core::train::{train_observed, EpochRecord};
use hyperkge_core::{add_reciprocals, EvalOptions, Split, TieBreak};

use crate::checkpoint;
use crate::config::{preset, Settings, PRESETS};
use crate::error::{Error, Result};
use crate::export::{export_tsv, import_tsv};
use crate::io::{load_dataset, read_vocabulary, resolve_data_dir, write_vocabulary, Dataset};
use crate::parallel::Threaded;

#[derive(Debug, Parser)]
#[command(name = "hyperkge", version, about = "Quaternion knowledge-graph embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write checkpoint, log, dictionaries and config.
    Train(TrainArgs),
    /// Filtered link-prediction metrics of a checkpoint.
    Eval(EvalArgs),
    /// Dump a checkpoint as text.
    Export(ExportArgs),
    /// Build a checkpoint and dictionaries from a text dump.
    Import(ImportArgs),
    /// Number of free parameters for a dataset and configuration.
    Params(ParamsArgs),
    /// List presets, or print one.
    Presets { name: Option<String> },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Shipped preset applied before --config and flags.
    #[arg(long)]
    preset: Option<String>,
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// quate, quate-raw, weighted-product, dual-rotation, complex, distmult, octonione.
    #[arg(long)]
    variant: Option<String>,
    /// Use octonions instead of quaternions.
    #[arg(long)]
    octonion: bool,
    #[arg(long)]
    dim: Option<usize>,
    /// Add a reciprocal relation for every relation.
    #[arg(long)]
    reciprocal: bool,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Dataset directory, or a name under $HYPERKGE_DATA.
    #[arg(long)]
    data: String,
    /// Output directory.
    #[arg(long, default_value = "run")]
    out: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    /// L2 rate on entities.
    #[arg(long)]
    lambda1: Option<f64>,
    /// L2 rate on relations.
    #[arg(long)]
    lambda2: Option<f64>,
    /// N3 rate.
    #[arg(long)]
    n3: Option<f64>,
    /// Keep relation normalisation under N3.
    #[arg(long)]
    keep_normalization: bool,
    /// Negatives per positive.
    #[arg(long)]
    neg: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Batches per epoch.
    #[arg(long)]
    batches: Option<usize>,
    /// uniform or bernoulli.
    #[arg(long)]
    sampler: Option<String>,
    /// Draw corruptions from the relation's observed heads/tails.
    #[arg(long)]
    type_constrained_sampling: bool,
    /// Resample corruptions that are observed triples.
    #[arg(long)]
    strict_negatives: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Epochs between validation evaluations (0 disables).
    #[arg(long)]
    eval_every: Option<usize>,
    /// Stagnant evaluations before stopping (0 never stops).
    #[arg(long)]
    patience: Option<usize>,
    /// polar, uniform or default.
    #[arg(long)]
    initializer: Option<String>,
    /// optimistic, pessimistic or average.
    #[arg(long)]
    ties: Option<String>,
    /// Rank against type-constrained candidates during validation.
    #[arg(long)]
    type_constraints: bool,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: String,
    /// train, valid or test.
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long, default_value = "average")]
    ties: String,
    #[arg(long)]
    type_constraints: bool,
    /// Add per-relation MRR.
    #[arg(long)]
    per_relation: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Directory with entities.dict and relations.dict (defaults to the
    /// checkpoint's directory).
    #[arg(long)]
    dict: Option<PathBuf>,
    /// Output file (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ImportArgs {
    #[arg(long)]
    tsv: PathBuf,
    /// Directory for model.qkge and the dictionaries.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ParamsArgs {
    #[arg(long)]
    data: String,
    #[command(flatten)]
    model: ModelArgs,
}

pub const CHECKPOINT_FILE: &str = "model.qkge";
pub const LOG_FILE: &str = "train.log";
pub const CONFIG_FILE: &str = "config.txt";

fn settings_from(model: &ModelArgs, flags: &[(&str, Option<String>)]) -> Result<Settings> {
    let mut settings = Settings::default();
    if let Some(name) = &model.preset {
        let text = preset(name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::Usage(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })?;
        settings.apply_text(text, name).map_err(|e| Error::Usage(e.to_string()))?;
    }
    if let Some(path) = &model.config {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        settings
            .apply_text(&text, &path.display().to_string())
            .map_err(|e| Error::Usage(e.to_string()))?;
    }
    let model_flags = [
        ("variant", model.variant.clone()),
        ("dim", model.dim.map(|v| v.to_string())),
        ("octonion", model.octonion.then(|| "true".to_string())),
        ("reciprocal", model.reciprocal.then(|| "true".to_string())),
    ];
    for (key, value) in model_flags.iter().chain(flags) {
        if let Some(value) = value {
            settings
                .set(key, value)
                .map_err(|e| Error::Usage(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
    }
    Ok(settings)
}

fn flag<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn switch(on: bool) -> Option<String> {
    on.then(|| "true".to_string())
}

fn load(data: &str) -> Result<Dataset> {
    let dir = resolve_data_dir(data)?;
    let dataset = load_dataset(&dir)?;
    eprintln!("loaded {}: {}", dir.display(), dataset.summary);
    let empty = dataset.store.type_constraints().empty_relations();
    if !empty.is_empty() && !dataset.store.train().is_empty() {
        eprintln!("note: {} relations never occur in train", empty.len());
    }
    Ok(dataset)
}

fn with_reciprocals(dataset: Dataset, reciprocal: bool) -> Result<Dataset> {
    if !reciprocal {
        return Ok(dataset);
    }
    let (vocab, store) = add_reciprocals(&dataset.store, &dataset.vocab)?;
    Ok(Dataset { vocab, store, ..dataset })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let flags = [
        ("lambda1", flag(&args.lambda1)),
        ("lambda2", flag(&args.lambda2)),
        ("n3", flag(&args.n3)),
        ("keep_normalization", switch(args.keep_normalization)),
        ("neg", flag(&args.neg)),
        ("lr", flag(&args.lr)),
        ("epochs", flag(&args.epochs)),
        ("batches", flag(&args.batches)),
        ("sampler", args.sampler.clone()),
        ("type_constrained_sampling", switch(args.type_constrained_sampling)),
        ("strict_negatives", switch(args.strict_negatives)),
        ("seed", flag(&args.seed)),
        ("eval_every", flag(&args.eval_every)),
        ("patience", flag(&args.patience)),
        ("initializer", args.initializer.clone()),
        ("ties", args.ties.clone()),
        ("type_constraints", switch(args.type_constraints)),
        ("workers", flag(&args.workers)),
    ];
    let mut settings = settings_from(&args.model, &flags)?;
    for w in settings.finalize()? {
        eprintln!("warning: {w}");
    }
    let resolved = settings.render();
    print!("{resolved}");

    let dataset = with_reciprocals(load(&args.data)?, settings.train.reciprocal)?;
    create_dir(&args.out)?;
    fs::write(args.out.join(CONFIG_FILE), &resolved).map_err(|e| Error::io(args.out.join(CONFIG_FILE), e))?;
    write_vocabulary(&args.out, &dataset.vocab)?;

    let log_path = args.out.join(LOG_FILE);
    let mut log = fs::File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    let mut write_error = None;
    let mut observe = |r: &EpochRecord| {
        let line = match r.valid_mrr {
            Some(m) => {
                eprintln!("epoch {}: loss {:.6}, valid MRR {m:.6}", r.epoch, r.loss);
                format!("{}\t{}\t{m}\n", r.epoch, r.loss)
            }
            None => format!("{}\t{}\n", r.epoch, r.loss),
        };
        if write_error.is_none() {
            write_error = log.write_all(line.as_bytes()).err();
        }
    };
    let executor = Threaded::new(NonZeroUsize::new(settings.workers).expect("validated"));
    let outcome = train_observed(&dataset.store, &settings.train, &executor, &mut observe)?;
    if let Some(e) = write_error {
        return Err(Error::io(&log_path, e));
    }
    let ckpt = args.out.join(CHECKPOINT_FILE);
    checkpoint::save(&ckpt, &outcome.table, settings.train.reciprocal)?;
    match outcome.log.best() {
        Some((epoch, mrr)) => eprintln!("best valid MRR {mrr:.6} at epoch {epoch}; wrote {}", ckpt.display()),
        None => eprintln!("wrote {}", ckpt.display()),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let split: Split = args.split.parse().map_err(|e: hyperkge_core::Error| Error::Usage(e.to_string()))?;
    let ties: TieBreak = args.ties.parse().map_err(|e: hyperkge_core::Error| Error::Usage(e.to_string()))?;
    let workers = NonZeroUsize::new(args.workers).ok_or_else(|| Error::Usage("workers must be at least 1".into()))?;
    let ckpt = checkpoint::load(&args.checkpoint)?;
    let dataset = with_reciprocals(load(&args.data)?, ckpt.reciprocal)?;
    let table = &ckpt.table;
    if table.num_entities() != dataset.store.num_entities() || table.num_relations() != dataset.store.num_relations() {
        return Err(Error::Mismatch(format!(
            "checkpoint has N={} M={}, dataset has N={} M={}{}",
            table.num_entities(),
            table.num_relations(),
            dataset.store.num_entities(),
            dataset.store.num_relations(),
            if ckpt.reciprocal { " after adding reciprocals" } else { "" }
        )));
    }
    let options = EvalOptions {
        ties,
        type_constraints: args.type_constraints,
    };
    let report = hyperkge_core::train::BatchExecutor::evaluate(&Threaded::new(workers), table, &dataset.store, split, options)?;
    print!("{}", report.render(args.per_relation, Some(&dataset.vocab)));
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let ckpt = checkpoint::load(&args.checkpoint)?;
    let dict = args.dict.unwrap_or_else(|| {
        args.checkpoint
            .parent()
            .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
    });
    let vocab = read_vocabulary(&dict)?;
    let text = export_tsv(&ckpt, &vocab)?;
    match args.out {
        Some(path) => fs::write(&path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn cmd_import(args: ImportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.tsv).map_err(|e| Error::io(&args.tsv, e))?;
    let (ckpt, vocab) = import_tsv(&text, &args.tsv.display().to_string())?;
    create_dir(&args.out)?;
    checkpoint::save(&args.out.join(CHECKPOINT_FILE), &ckpt.table, ckpt.reciprocal)?;
    write_vocabulary(&args.out, &vocab)
}

fn cmd_params(args: ParamsArgs) -> Result<()> {
    let mut settings = settings_from(&args.model, &[])?;
    settings.finalize()?;
    let dataset = load(&args.data)?;
    let t = &settings.train;
    let count = parameter_count_for(
        dataset.vocab.num_entities(),
        dataset.vocab.num_relations(),
        t.dim,
        t.variant,
        t.reciprocal,
    );
    println!("{count}");
    Ok(())
}

fn cmd_presets(name: Option<String>) -> Result<()> {
    match name {
        Some(name) => {
            let text = preset(&name).ok_or_else(|| Error::Usage(format!("unknown preset {name:?}")))?;
            print!("{text}");
        }
        None => {
            for (name, text) in PRESETS {
                let about = text.lines().next().unwrap_or("").trim_start_matches("# ");
                println!("{name}\t{about}");
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Export(a) => cmd_export(a),
        Command::Import(a) => cmd_import(a),
        Command::Params(a) => cmd_params(a),
        Command::Presets { name } => cmd_presets(name),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
