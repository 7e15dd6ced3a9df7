//! `nadi` command-line interface.

use std::collections::HashMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    concat_splits, corpus_stats, load_corpus, read_submission, write_submission, ColumnSchema,
    LabelVocab, Level, Register, Subtask,
};
use crate::evaluation::report;
use crate::harness::{run_benchmark, BenchmarkSpec, ExperimentConfig, NoTrace, Pipeline};
use crate::normalizer::{NormConfig, Normalizer, SegmentLexicon, Segmenter};
use crate::synthetic::{four_dialects, write_synthetic};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "nadi", version, about = "Arabic tweet dialect identification")]
struct Cli {
    /// Seed overriding every experiment's rng_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Benchmark/grid description file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize the text column of a TSV file.
    Normalize(NormalizeArgs),
    /// Per-label counts of a labeled corpus.
    Stats(StatsArgs),
    /// Fit a pipeline and save it to a directory.
    Train(TrainArgs),
    /// Score a submission against gold labels.
    Evaluate(EvaluateArgs),
    /// Predict labels with a saved pipeline and write a submission.
    Predict(PredictArgs),
    /// Run the grid in --config, refit the best row and predict test.
    Benchmark(BenchmarkArgs),
    /// Write the synthetic four-dialect corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    segment: bool,
    #[arg(long)]
    no_spacing: bool,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    max_repeat: u32,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    presegmented: Option<PathBuf>,
    /// Header name of the text column.
    #[arg(long, default_value = "tweet")]
    column: String,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "country")]
    level: Level,
    /// `province<TAB>country` vocab; labels are listed in its order.
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    train: PathBuf,
    /// Dev split, concatenated after train.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Output directory for the pipeline.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, default_value = "country")]
    level: Level,
    #[arg(long, default_value = "da")]
    register: Register,
    /// Experiment name in --config; defaults to the first one.
    #[arg(long)]
    experiment: Option<String>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, default_value = "country")]
    level: Level,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Directory written by `train` or `benchmark`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Output directory; defaults to `<config dir>/out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    /// Records per class in train, dev and test.
    #[arg(long, num_args = 3, value_delimiter = ',', default_values_t = [200, 50, 50])]
    per_class: Vec<usize>,
}

/// Run the CLI; returns the process exit code (2 usage, 1 data error).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl<E: Into<Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    match &cli.command {
        Command::Normalize(a) => cmd_normalize(a),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Train(a) => cmd_train(a, cli, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Predict(a) => cmd_predict(a),
        Command::Benchmark(a) => cmd_benchmark(a, cli, out),
        Command::Synth(a) => cmd_synth(a, cli),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn load_vocab(path: Option<&Path>) -> Result<LabelVocab> {
    Ok(match path {
        Some(p) => LabelVocab::from_file(p)?,
        None => LabelVocab::default(),
    })
}

fn cmd_normalize(a: &NormalizeArgs) -> std::result::Result<(), CliError> {
    let config = NormConfig {
        segment: a.segment,
        insert_spacing: !a.no_spacing,
        max_repeat: a.max_repeat as usize,
        ..NormConfig::default()
    };
    let lexicon = match &a.lexicon {
        Some(p) => SegmentLexicon::from_file(p)?,
        None => SegmentLexicon::default(),
    };
    let mut segmenter = Segmenter::new(lexicon);
    if let Some(p) = &a.presegmented {
        segmenter = segmenter.with_overrides_file(p)?;
    }
    let normalizer = Normalizer::with_segmenter(config, segmenter);

    let text = read(&a.input)?;
    let mut lines = text.lines().map(|l| l.trim_end_matches('\r')).peekable();
    let mut output = String::with_capacity(text.len());
    let column = match lines.peek() {
        Some(first) => {
            let fields: Vec<&str> = first.split('\t').collect();
            match fields.iter().position(|f| *f == a.column) {
                Some(i) => {
                    output.push_str(first);
                    output.push('\n');
                    lines.next();
                    i
                }
                None if fields.len() >= 2 => 1,
                None => 0,
            }
        }
        None => 0,
    };
    for line in lines {
        let mut fields: Vec<String> = line.split('\t').map(str::to_owned).collect();
        if let Some(f) = fields.get_mut(column) {
            *f = normalizer.normalize(f);
        }
        output.push_str(&fields.join("\t"));
        output.push('\n');
    }
    write_text(&a.out, &output)?;
    Ok(())
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let vocab = match (&a.vocab, a.level) {
        (Some(p), _) => Some(LabelVocab::from_file(p)?),
        (None, Level::Country) => Some(LabelVocab::default()),
        (None, Level::Province) => None,
    };
    let records = load_corpus(&a.input, &ColumnSchema::default(), Register::Da, vocab.as_ref())?;
    let stats = corpus_stats(&records, a.level, vocab.as_ref())?;
    emit(out, &stats.to_tsv())?;
    Ok(())
}

fn experiment_from(cli: &Cli, name: Option<&str>, subtask: Subtask) -> std::result::Result<ExperimentConfig, CliError> {
    let Some(path) = &cli.config else {
        let mut c = ExperimentConfig::new("default", subtask);
        if let Some(s) = cli.seed {
            c.hp.rng_seed = s;
        }
        return Ok(c);
    };
    let bench = BenchmarkSpec::load(path)?;
    let mut exps = bench.experiments(cli.seed)?;
    let idx = match name {
        Some(n) => exps
            .iter()
            .position(|e| e.name == n)
            .ok_or_else(|| usage(format!("no experiment named {n:?} in {}", path.display())))?,
        None if exps.is_empty() => return Err(usage(format!("{} has no experiments", path.display()))),
        None => 0,
    };
    let mut c = exps.swap_remove(idx);
    c.subtask = subtask;
    Ok(c)
}

fn cmd_train(a: &TrainArgs, cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let subtask = Subtask::new(a.level, a.register);
    let config = experiment_from(cli, a.experiment.as_deref(), subtask)?;
    let vocab = load_vocab(a.vocab.as_deref())?;
    if a.level == Level::Province && !vocab.has_provinces() {
        return Err(usage("province level needs --vocab with provinces"));
    }
    let schema = ColumnSchema::default();
    let train = load_corpus(&a.train, &schema, a.register, Some(&vocab))?;
    let records = match &a.dev {
        Some(p) => concat_splits(&train, &load_corpus(p, &schema, a.register, Some(&vocab))?)?,
        None => train,
    };
    let pipeline = Pipeline::fit(&records, &config, vocab.labels(a.level), &mut NoTrace)?;
    pipeline.save(&a.out)?;
    emit(out, &format!("trained {} on {} records -> {}\n", config.name, records.len(), a.out.display()))?;
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let vocab = load_vocab(a.vocab.as_deref())?;
    let gold = load_corpus(&a.gold, &ColumnSchema::default(), Register::Da, Some(&vocab))?;
    let preds: HashMap<String, String> = read_submission(&a.pred)?.into_iter().collect();
    let mut gold_labels = Vec::with_capacity(gold.len());
    let mut pred_labels = Vec::with_capacity(gold.len());
    for r in &gold {
        let g = r
            .label(a.level)
            .ok_or_else(|| crate::corpus::CorpusError::UnlabeledRecord { id: r.id.clone(), level: a.level })?;
        let p = preds.get(&r.id).ok_or_else(|| {
            Error::from(crate::evaluation::EvalError::UnknownLabel(format!("<no prediction for {}>", r.id)))
        })?;
        gold_labels.push(g);
        pred_labels.push(p.as_str());
    }
    if preds.len() != gold.len() {
        return Err(crate::evaluation::EvalError::LengthMismatch { gold: gold.len(), pred: preds.len() }.into());
    }
    let rep = report(&gold_labels, &pred_labels, vocab.labels(a.level))?;
    emit(out, &format!("{}\n{}", rep.summary(), rep.to_tsv()))?;
    Ok(())
}

fn cmd_predict(a: &PredictArgs) -> std::result::Result<(), CliError> {
    let pipeline = Pipeline::load(&a.model)?;
    let records = load_corpus(&a.input, &ColumnSchema::default(), Register::Da, None)?;
    let labels = pipeline.predict_all(&records)?;
    let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    write_submission(&ids, &labels, &a.out)?;
    Ok(())
}

fn cmd_benchmark(a: &BenchmarkArgs, cli: &Cli, out: &mut dyn Write) -> std::result::Result<(), CliError> {
    let path = cli.config.as_ref().ok_or_else(|| usage("benchmark needs --config <path>"))?;
    let bench = BenchmarkSpec::load(path)?;
    let out_dir = match &a.out {
        Some(d) => d.clone(),
        None => path.parent().unwrap_or(Path::new(".")).join("out"),
    };
    let outcome = run_benchmark(&bench, &out_dir, cli.seed, &mut NoTrace)?;
    let mut text = outcome.grid.table();
    text.push_str(&format!(
        "selected {} by {}; refit on {} records\n",
        outcome.grid.selected,
        outcome.grid.selection_metric.name(),
        outcome.training_records
    ));
    if let Some(r) = &outcome.report {
        text.push_str(&format!("test: {}\n", r.summary()));
    }
    text.push_str(&format!("outputs in {}\n", outcome.out_dir.display()));
    emit(out, &text)?;
    Ok(())
}

fn cmd_synth(a: &SynthArgs, cli: &Cli) -> std::result::Result<(), CliError> {
    let per_class: [usize; 3] = a.per_class.clone().try_into().map_err(|_| usage("--per-class takes three counts"))?;
    let corpus = four_dialects(cli.seed.unwrap_or(42), per_class, Register::Da);
    write_synthetic(&corpus, &a.out)?;
    Ok(())
}
