//! Benchmark description files.
//!
//! A benchmark file is TOML with a `format = 1` header, a `[data]` table and
//! one `[[experiment]]` table per grid row, in grid order:
//!
//! ```toml
//! format = 1
//! selection = "weighted_f1"   # or "macro_f1", "accuracy"
//! seed = 42                   # optional, overrides every hp.rng_seed
//!
//! [data]
//! train = "train.tsv"         # paths relative to this file
//! dev = "dev.tsv"
//! test = "test.tsv"
//! vocab = "vocab.tsv"         # optional for country level
//! register = "da"
//!
//! [[experiment]]
//! name = "char2-5"
//! subtask = "1.2"
//! lexicon = "clitics.txt"     # optional
//! presegmented = "segmented.tsv" # optional
//! [experiment.norm]
//! segment = false
//! [experiment.features]
//! n_min = 2
//! n_max = 5
//! [experiment.hp]
//! epochs = 5
//! ```
//!
//! Omitted fields take their defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classifier::HyperParams;
use crate::corpus::{load_corpus, ColumnSchema, LabelVocab, Register, Subtask};
use crate::evaluation::EvaluationReport;
use crate::features::FeatureConfig;
use crate::normalizer::{NormConfig, SegmentLexicon, Segmenter};
use crate::{Error, Result};

use super::{finalize, run_grid, ExperimentConfig, GridResult, HarnessError, SelectionMetric, Tracer};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub format: u32,
    #[serde(default)]
    pub selection: SelectionMetric,
    pub seed: Option<u64>,
    pub data: DataSpec,
    pub experiment: Vec<ExperimentSpec>,
    #[serde(skip)]
    base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub train: PathBuf,
    pub dev: PathBuf,
    pub test: PathBuf,
    pub vocab: Option<PathBuf>,
    pub register: Register,
    #[serde(default)]
    pub columns: ColumnSchema,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub subtask: String,
    pub lexicon: Option<PathBuf>,
    pub presegmented: Option<PathBuf>,
    #[serde(default)]
    pub norm: NormConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub hp: HyperParams,
}

impl BenchmarkSpec {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let cfg_err = |reason: String| HarnessError::Config {
            path: base_dir.to_owned(),
            reason,
        };
        let mut bench: BenchmarkSpec = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        if bench.format != 1 {
            return Err(cfg_err(format!("unsupported format {}", bench.format)).into());
        }
        bench.base_dir = base_dir.to_owned();
        Ok(bench)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            Error::Harness(HarnessError::Config { reason, .. }) => HarnessError::Config {
                path: path.to_owned(),
                reason,
            }
            .into(),
            other => other,
        })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_owned()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn vocab(&self) -> Result<LabelVocab> {
        match &self.data.vocab {
            Some(p) => Ok(LabelVocab::from_file(&self.resolve(p))?),
            None => Ok(LabelVocab::default()),
        }
    }

    /// Grid rows with segmenters loaded and `seed_override` (or the file's
    /// `seed`) applied.
    pub fn experiments(&self, seed_override: Option<u64>) -> Result<Vec<ExperimentConfig>> {
        let seed = seed_override.or(self.seed);
        self.experiment
            .iter()
            .map(|e| {
                let subtask: Subtask = e.subtask.parse().map_err(|reason| HarnessError::Config {
                    path: self.base_dir.clone(),
                    reason: format!("experiment {:?}: {reason}", e.name),
                })?;
                let lexicon = match &e.lexicon {
                    Some(p) => SegmentLexicon::from_file(&self.resolve(p))?,
                    None => SegmentLexicon::default(),
                };
                let mut segmenter = Segmenter::new(lexicon);
                if let Some(p) = &e.presegmented {
                    segmenter = segmenter.with_overrides_file(&self.resolve(p))?;
                }
                let mut hp = e.hp.clone();
                if let Some(s) = seed {
                    hp.rng_seed = s;
                }
                Ok(ExperimentConfig {
                    name: e.name.clone(),
                    norm: e.norm,
                    segmenter,
                    features: e.features.clone(),
                    hp,
                    subtask,
                })
            })
            .collect()
    }
}

#[derive(Debug)]
pub struct BenchmarkOutcome {
    pub grid: GridResult,
    pub report: Option<EvaluationReport>,
    pub training_records: usize,
    pub out_dir: PathBuf,
}

pub const GRID_FILE: &str = "grid.tsv";
pub const SUBMISSION_FILE: &str = "submission.csv";
pub const REPORT_FILE: &str = "report.tsv";

/// Run the grid, refit the selected config on train+dev and predict test.
///
/// Writes `grid.tsv`, `submission.csv`, the fitted pipeline
/// (`model.bin`, `idf.bin`, `pipeline.toml`) and, for a labeled test split,
/// `report.tsv` into `out_dir`.
pub fn run_benchmark(
    bench: &BenchmarkSpec,
    out_dir: &Path,
    seed_override: Option<u64>,
    tracer: &mut dyn Tracer,
) -> Result<BenchmarkOutcome> {
    let vocab = bench.vocab()?;
    let configs = bench.experiments(seed_override)?;
    let schema = &bench.data.columns;
    let register = bench.data.register;
    let load = |p: &Path| load_corpus(&bench.resolve(p), schema, register, Some(&vocab));
    let train = load(&bench.data.train)?;
    let dev = load(&bench.data.dev)?;
    let test = load(&bench.data.test)?;

    let grid = run_grid(&train, &dev, &configs, &vocab, bench.selection, tracer)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: &str, text: String| {
        let p = out_dir.join(name);
        std::fs::write(&p, text).map_err(|e| Error::io(p, e))
    };
    write(GRID_FILE, grid.to_tsv())?;

    let chosen = configs
        .iter()
        .find(|c| c.name == grid.selected)
        .expect("selected config is in the grid");
    let outcome = finalize(
        &train,
        &dev,
        &test,
        chosen,
        &vocab,
        &out_dir.join(SUBMISSION_FILE),
        tracer,
    )?;
    outcome.pipeline.save(out_dir)?;
    if let Some(r) = &outcome.report {
        write(REPORT_FILE, r.to_tsv())?;
    }
    Ok(BenchmarkOutcome {
        grid,
        report: outcome.report,
        training_records: outcome.training_records,
        out_dir: out_dir.to_owned(),
    })
}
