//! Experiment protocol: grid over configurations with selection on dev,
//! refit on train+dev, predict test and write the submission.

mod config;
mod pipeline;

pub use config::{
    run_benchmark, BenchmarkOutcome, BenchmarkSpec, DataSpec, ExperimentSpec, GRID_FILE, REPORT_FILE,
    SUBMISSION_FILE,
};
pub use pipeline::{Pipeline, IDF_FILE, MANIFEST_FILE, MODEL_FILE, OVERRIDES_FILE};

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::HyperParams;
use crate::corpus::{concat_splits, write_submission, LabelVocab, Level, Subtask, TweetRecord};
use crate::evaluation::{report, EvaluationReport};
use crate::features::FeatureConfig;
use crate::normalizer::{NormConfig, Normalizer, Segmenter};
use crate::{Error, Result};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("the grid has no configurations")]
    EmptyGrid,
    #[error("configuration name {0:?} is used twice")]
    DuplicateName(String),
    #[error("config {name:?} targets subtask {subtask} but {split} record {id:?} has no {level} label")]
    SubtaskMismatch {
        name: String,
        subtask: Subtask,
        split: &'static str,
        id: String,
        level: Level,
    },
    #[error("config {name:?} targets {subtask} but the {split} split is {found}")]
    RegisterMismatch {
        name: String,
        subtask: Subtask,
        split: &'static str,
        found: crate::corpus::Register,
    },
    #[error("config {0:?} is province-level but the vocab has no provinces")]
    MissingProvinceVocab(String),
    #[error("record {id:?} has no {level} label")]
    Unlabeled { id: String, level: Level },
    #[error("label {0:?} is not in the vocabulary")]
    LabelOutsideVocab(String),
    #[error("model, idf table and feature config do not belong together")]
    FeatureMismatch,
    #[error("config {name:?}: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },
    #[error("config {name:?}: {reason}")]
    InvalidNorm { name: String, reason: String },
    #[error("{}: {reason}", path.display())]
    Config { path: PathBuf, reason: String },
}

/// One row of the grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub norm: NormConfig,
    pub segmenter: Segmenter,
    pub features: FeatureConfig,
    pub hp: HyperParams,
    pub subtask: Subtask,
}

impl ExperimentConfig {
    pub fn new(name: impl Into<String>, subtask: Subtask) -> Self {
        Self {
            name: name.into(),
            norm: NormConfig::default(),
            segmenter: Segmenter::default(),
            features: FeatureConfig::default(),
            hp: HyperParams::default(),
            subtask,
        }
    }

    pub fn normalizer(&self) -> Normalizer {
        Normalizer::with_segmenter(self.norm, self.segmenter.clone())
    }

    fn validate(&self) -> Result<()> {
        let wrap = |e: Error| HarnessError::Experiment {
            name: self.name.clone(),
            source: Box::new(e),
        };
        self.norm.validate().map_err(|reason| HarnessError::InvalidNorm {
            name: self.name.clone(),
            reason,
        })?;
        self.features.validate().map_err(|e| wrap(e.into()))?;
        self.hp.validate().map_err(|e| wrap(e.into()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMetric {
    #[default]
    WeightedF1,
    MacroF1,
    Accuracy,
}

impl SelectionMetric {
    pub fn name(self) -> &'static str {
        match self {
            Self::WeightedF1 => "weighted_f1",
            Self::MacroF1 => "macro_f1",
            Self::Accuracy => "accuracy",
        }
    }
}

impl FromStr for SelectionMetric {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "weighted_f1" => Ok(Self::WeightedF1),
            "macro_f1" => Ok(Self::MacroF1),
            "accuracy" => Ok(Self::Accuracy),
            _ => Err(format!("unknown selection metric {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub name: String,
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub macro_f1: f64,
}

impl GridRow {
    pub fn metric(&self, metric: SelectionMetric) -> f64 {
        match metric {
            SelectionMetric::WeightedF1 => self.weighted_f1,
            SelectionMetric::MacroF1 => self.macro_f1,
            SelectionMetric::Accuracy => self.accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
    pub selected: String,
    pub selection_metric: SelectionMetric,
}

/// Index of the row maximizing `metric`; the earliest row wins ties.
///
/// # Panics
///
/// If `rows` is empty.
pub fn select(rows: &[GridRow], metric: SelectionMetric) -> usize {
    assert!(!rows.is_empty());
    let mut best = 0;
    for (i, row) in rows.iter().enumerate().skip(1) {
        if row.metric(metric) > rows[best].metric(metric) {
            best = i;
        }
    }
    best
}

impl GridResult {
    pub fn selected_row(&self) -> &GridRow {
        self.rows
            .iter()
            .find(|r| r.name == self.selected)
            .expect("selected row exists")
    }

    /// Aligned text table, selected row marked with `*`.
    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0).max(6);
        let mut s = format!(
            "  {:<width$}  {:>11}  {:>8}  {:>8}\n",
            "config", "weighted_f1", "accuracy", "macro_f1"
        );
        for r in &self.rows {
            let mark = if r.name == self.selected { '*' } else { ' ' };
            let pad = width - r.name.chars().count();
            let _ = writeln!(
                s,
                "{mark} {}{}  {:>11.4}  {:>8.4}  {:>8.4}",
                r.name,
                " ".repeat(pad),
                r.weighted_f1,
                r.accuracy,
                r.macro_f1
            );
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("config\tweighted_f1\taccuracy\tmacro_f1\tselected\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{:?}\t{:?}\t{:?}\t{}",
                r.name,
                r.weighted_f1,
                r.accuracy,
                r.macro_f1,
                r.name == self.selected
            );
        }
        s
    }
}

/// Which fit a set of records is entering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStage {
    Idf,
    Train,
}

/// Observer of the records that enter each fit.
pub trait Tracer {
    fn on_fit(&mut self, stage: FitStage, config: &str, ids: &[&str]);
}

/// Tracer that ignores everything.
pub struct NoTrace;

impl Tracer for NoTrace {
    fn on_fit(&mut self, _: FitStage, _: &str, _: &[&str]) {}
}

/// Tracer that keeps every event.
#[derive(Debug, Default)]
pub struct RecordingTracer {
    pub events: Vec<(FitStage, String, Vec<String>)>,
}

impl Tracer for RecordingTracer {
    fn on_fit(&mut self, stage: FitStage, config: &str, ids: &[&str]) {
        self.events.push((
            stage,
            config.to_owned(),
            ids.iter().map(|s| s.to_string()).collect(),
        ));
    }
}

fn check_split(
    config: &ExperimentConfig,
    split: &'static str,
    records: &[TweetRecord],
) -> Result<()> {
    let level = config.subtask.level;
    for r in records {
        if r.register != config.subtask.register {
            return Err(HarnessError::RegisterMismatch {
                name: config.name.clone(),
                subtask: config.subtask,
                split,
                found: r.register,
            }
            .into());
        }
        if r.label(level).is_none() {
            return Err(HarnessError::SubtaskMismatch {
                name: config.name.clone(),
                subtask: config.subtask,
                split,
                id: r.id.clone(),
                level,
            }
            .into());
        }
    }
    Ok(())
}

fn check_configs(
    configs: &[ExperimentConfig],
    vocab: &LabelVocab,
    labeled: &[(&'static str, &[TweetRecord])],
) -> Result<()> {
    if configs.is_empty() {
        return Err(HarnessError::EmptyGrid.into());
    }
    let mut names = HashSet::new();
    for c in configs {
        if !names.insert(c.name.as_str()) {
            return Err(HarnessError::DuplicateName(c.name.clone()).into());
        }
        c.validate()?;
        if c.subtask.level == Level::Province && !vocab.has_provinces() {
            return Err(HarnessError::MissingProvinceVocab(c.name.clone()).into());
        }
        for (split, records) in labeled {
            check_split(c, split, records)?;
        }
    }
    Ok(())
}

fn annotate(name: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| {
        HarnessError::Experiment {
            name: name.to_owned(),
            source: Box::new(e),
        }
        .into()
    }
}

/// Fit every config on `train` and score it on `dev`.
///
/// All configs are checked against both splits before any training starts.
pub fn run_grid(
    train: &[TweetRecord],
    dev: &[TweetRecord],
    configs: &[ExperimentConfig],
    vocab: &LabelVocab,
    selection_metric: SelectionMetric,
    tracer: &mut dyn Tracer,
) -> Result<GridResult> {
    check_configs(configs, vocab, &[("train", train), ("dev", dev)])?;
    let mut rows = Vec::with_capacity(configs.len());
    for config in configs {
        let level = config.subtask.level;
        let labels = vocab.labels(level);
        let row = (|| -> Result<GridRow> {
            let pipeline = Pipeline::fit(train, config, labels, tracer)?;
            let pred = pipeline.predict_all(dev)?;
            let gold: Vec<&str> = dev.iter().map(|r| r.label(level).expect("checked")).collect();
            let rep = report(&gold, &pred, labels)?;
            Ok(GridRow {
                name: config.name.clone(),
                weighted_f1: rep.weighted_f1,
                accuracy: rep.accuracy,
                macro_f1: rep.macro_f1,
            })
        })()
        .map_err(annotate(&config.name))?;
        rows.push(row);
    }
    let best = select(&rows, selection_metric);
    Ok(GridResult {
        selected: rows[best].name.clone(),
        rows,
        selection_metric,
    })
}

#[derive(Debug)]
pub struct FinalOutcome {
    pub pipeline: Pipeline,
    pub predictions: Vec<String>,
    /// Present when every test record is labeled.
    pub report: Option<EvaluationReport>,
    pub training_records: usize,
}

/// Refit on train+dev, predict every test record in order and write the
/// submission to `submission`.
pub fn finalize(
    train: &[TweetRecord],
    dev: &[TweetRecord],
    test: &[TweetRecord],
    config: &ExperimentConfig,
    vocab: &LabelVocab,
    submission: &Path,
    tracer: &mut dyn Tracer,
) -> Result<FinalOutcome> {
    check_configs(std::slice::from_ref(config), vocab, &[("train", train), ("dev", dev)])?;
    let level = config.subtask.level;
    let labels = vocab.labels(level);
    let combined = concat_splits(train, dev)?;
    let pipeline = Pipeline::fit(&combined, config, labels, tracer).map_err(annotate(&config.name))?;
    let predictions = pipeline.predict_all(test)?;
    let ids: Vec<&str> = test.iter().map(|r| r.id.as_str()).collect();
    write_submission(&ids, &predictions, submission)?;

    let gold: Option<Vec<&str>> = test.iter().map(|r| r.label(level)).collect();
    let report = match gold {
        Some(gold) if !gold.is_empty() => Some(report(&gold, &predictions, labels)?),
        _ => None,
    };
    Ok(FinalOutcome {
        pipeline,
        predictions,
        report,
        training_records: combined.len(),
    })
}
