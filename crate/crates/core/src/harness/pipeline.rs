use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{self, truncate, LinearModel};
use crate::corpus::{Level, TweetRecord};
use crate::features::{fit_idf_texts, vectorize, FeatureConfig, IdfTable, SparseVector};
use crate::normalizer::{NormConfig, Normalizer, SegmentLexicon, Segmenter};
use crate::{Error, Result};

use super::{ExperimentConfig, FitStage, HarnessError, Tracer};

/// Everything needed to turn a raw tweet into a label.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub(crate) normalizer: Normalizer,
    pub(crate) features: FeatureConfig,
    pub(crate) max_seq_len: usize,
    pub(crate) level: Level,
    pub(crate) idf: IdfTable,
    pub(crate) model: LinearModel,
    pub(crate) fallback: String,
}

impl Pipeline {
    /// Fit idf and model on `records`, which must all carry a label at the
    /// config's level that appears in `labels`.
    pub fn fit(
        records: &[TweetRecord],
        config: &ExperimentConfig,
        labels: &[String],
        tracer: &mut dyn Tracer,
    ) -> Result<Self> {
        let level = config.subtask.level;
        let normalizer = config.normalizer();
        let prepared = prepare(&normalizer, config.hp.max_seq_len, records);

        let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
        tracer.on_fit(FitStage::Idf, &config.name, &ids);
        let idf = fit_idf_texts(prepared.iter().map(String::as_str), &config.features)?;

        let mut counts = vec![0usize; labels.len()];
        let mut examples = Vec::with_capacity(records.len());
        for (r, text) in records.iter().zip(&prepared) {
            let label = r.label(level).ok_or_else(|| HarnessError::Unlabeled {
                id: r.id.clone(),
                level,
            })?;
            let y = labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| HarnessError::LabelOutsideVocab(label.to_owned()))?;
            counts[y] += 1;
            examples.push((vectorize(text, &config.features, &idf)?, y));
        }
        tracer.on_fit(FitStage::Train, &config.name, &ids);
        let model = classifier::train(&examples, &config.hp, labels.len(), config.features.dim)?
            .with_labels(labels.to_vec())?
            .with_feature_fingerprint(config.features.fingerprint());

        // majority class, earliest label on ties
        let majority = counts
            .iter()
            .enumerate()
            .fold(0, |best, (i, &n)| if n > counts[best] { i } else { best });

        Ok(Self {
            normalizer,
            features: config.features.clone(),
            max_seq_len: config.hp.max_seq_len,
            level,
            idf,
            model,
            fallback: labels[majority].clone(),
        })
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn idf(&self) -> &IdfTable {
        &self.idf
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Label predicted when a tweet normalizes to nothing.
    pub fn fallback_label(&self) -> &str {
        &self.fallback
    }

    /// Normalized, truncated text as fed to the featurizer.
    pub fn prepare(&self, text: &str) -> String {
        truncate(&self.normalizer.normalize(text), self.max_seq_len).to_owned()
    }

    pub fn featurize(&self, text: &str) -> Result<SparseVector> {
        Ok(vectorize(&self.prepare(text), &self.features, &self.idf)?)
    }

    pub fn predict(&self, text: &str) -> Result<&str> {
        let prepared = self.prepare(text);
        if prepared.is_empty() {
            return Ok(&self.fallback);
        }
        let v = vectorize(&prepared, &self.features, &self.idf)?;
        Ok(self.model.predict(&v)?)
    }

    pub fn predict_all(&self, records: &[TweetRecord]) -> Result<Vec<String>> {
        records
            .iter()
            .map(|r| self.predict(&r.text).map(str::to_owned))
            .collect()
    }

    /// Write `model.bin`, `idf.bin`, `pipeline.toml` and, when the segmenter
    /// has an override table, `presegmented.tsv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.model.save(&dir.join(MODEL_FILE))?;
        self.idf.save(&dir.join(IDF_FILE))?;
        let seg = self.normalizer.segmenter();
        let manifest = Manifest {
            format: 1,
            level: self.level,
            max_seq_len: self.max_seq_len,
            fallback_label: self.fallback.clone(),
            norm: *self.normalizer.config(),
            features: self.features.clone(),
            segmenter: SegmenterManifest {
                prefixes: seg.lexicon().prefixes().to_vec(),
                suffixes: seg.lexicon().suffixes().to_vec(),
                min_stem_len: seg.lexicon().min_stem_len(),
            },
        };
        let text = toml::to_string(&manifest).expect("manifest serializes");
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| Error::io(path, e))?;
        let overrides = seg.overrides();
        if !overrides.is_empty() {
            let mut tsv = String::new();
            for (raw, segmented) in overrides {
                tsv.push_str(raw);
                tsv.push('\t');
                tsv.push_str(segmented);
                tsv.push('\n');
            }
            let path = dir.join(OVERRIDES_FILE);
            std::fs::write(&path, tsv).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: Manifest = toml::from_str(&text).map_err(|e| HarnessError::Config {
            path: path.clone(),
            reason: e.message().to_owned(),
        })?;
        if manifest.format != 1 {
            return Err(HarnessError::Config {
                path,
                reason: format!("unsupported format {}", manifest.format),
            }
            .into());
        }
        let lexicon = SegmentLexicon::new(
            manifest.segmenter.prefixes,
            manifest.segmenter.suffixes,
            manifest.segmenter.min_stem_len,
        )?;
        let mut segmenter = Segmenter::new(lexicon);
        let overrides = dir.join(OVERRIDES_FILE);
        if overrides.exists() {
            segmenter = segmenter.with_overrides_file(&overrides)?;
        }
        manifest.norm.validate().map_err(|reason| HarnessError::Config {
            path: dir.join(MANIFEST_FILE),
            reason,
        })?;
        let model = LinearModel::load(&dir.join(MODEL_FILE))?;
        let idf = IdfTable::load(&dir.join(IDF_FILE))?;
        if model.feature_fingerprint() != manifest.features.fingerprint() || idf.dim() != model.dim() {
            return Err(HarnessError::FeatureMismatch.into());
        }
        Ok(Self {
            normalizer: Normalizer::with_segmenter(manifest.norm, segmenter),
            features: manifest.features,
            max_seq_len: manifest.max_seq_len,
            level: manifest.level,
            idf,
            model,
            fallback: manifest.fallback_label,
        })
    }
}

pub const MODEL_FILE: &str = "model.bin";
pub const IDF_FILE: &str = "idf.bin";
pub const MANIFEST_FILE: &str = "pipeline.toml";
pub const OVERRIDES_FILE: &str = "presegmented.tsv";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: u32,
    level: Level,
    max_seq_len: usize,
    fallback_label: String,
    norm: NormConfig,
    features: FeatureConfig,
    segmenter: SegmenterManifest,
}

#[derive(Debug, Serialize, Deserialize)]
struct SegmenterManifest {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    min_stem_len: usize,
}

/// Normalize then truncate every record's text.
pub(crate) fn prepare(normalizer: &Normalizer, max_seq_len: usize, records: &[TweetRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| truncate(&normalizer.normalize(&r.text), max_seq_len).to_owned())
        .collect()
}
