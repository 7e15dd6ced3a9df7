//! Multinomial logistic regression over sparse features, trained with
//! mini-batch SGD.
//!
//! `adam_epsilon` is accepted for config compatibility with transformer
//! fine-tuning setups and reported, but plain SGD does not use it.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::SparseVector;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("class index {index} out of range for {num_classes} classes")]
    ClassIndexOutOfRange { index: usize, num_classes: usize },
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("vector dim {found} does not match model dim {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{labels} labels for {num_classes} classes")]
    LabelCount { labels: usize, num_classes: usize },
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperParams(String),
    #[error("weights became non-finite in epoch {epoch}; lower the learning rate")]
    Diverged { epoch: usize },
    #[error("{}: not a model file ({reason})", path.display())]
    BadFile { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperParams {
    pub learning_rate: f64,
    /// Unused by SGD.
    pub adam_epsilon: f64,
    /// Characters kept per tweet before featurization.
    pub max_seq_len: usize,
    pub batch_size: usize,
    pub epochs: usize,
    pub l2: f64,
    pub rng_seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            adam_epsilon: 1e-8,
            max_seq_len: 256,
            batch_size: 40,
            epochs: 5,
            l2: 1e-6,
            rng_seed: 42,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::InvalidHyperParams(m.to_owned()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad("adam_epsilon must be positive");
        }
        if self.max_seq_len == 0 {
            return bad("max_seq_len must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(self.l2 >= 0.0 && self.l2 * self.learning_rate < 1.0) {
            return bad("l2 must be nonnegative with l2 * learning_rate < 1");
        }
        Ok(())
    }
}

/// First `max_seq_len` Unicode scalar values of `text`.
pub fn truncate(text: &str, max_seq_len: usize) -> &str {
    match text.char_indices().nth(max_seq_len) {
        Some((i, _)) => &text[..i],
        None => text,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    num_classes: usize,
    dim: usize,
    /// Row-major `[num_classes × dim]`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    class_labels: Vec<String>,
    feature_fingerprint: u64,
}

impl LinearModel {
    pub fn zeros(num_classes: usize, dim: usize) -> Result<Self, ClassifierError> {
        if num_classes < 2 {
            return Err(ClassifierError::TooFewClasses(num_classes));
        }
        Ok(Self {
            num_classes,
            dim,
            weights: vec![0.0; num_classes * dim],
            bias: vec![0.0; num_classes],
            class_labels: (0..num_classes).map(|i| i.to_string()).collect(),
            feature_fingerprint: 0,
        })
    }

    /// # Panics
    ///
    /// If the shapes do not match `num_classes × dim`.
    pub fn from_parts(num_classes: usize, dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, ClassifierError> {
        let mut m = Self::zeros(num_classes, dim)?;
        assert_eq!(weights.len(), num_classes * dim);
        assert_eq!(bias.len(), num_classes);
        m.weights = weights;
        m.bias = bias;
        Ok(m)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, ClassifierError> {
        if labels.len() != self.num_classes {
            return Err(ClassifierError::LabelCount {
                labels: labels.len(),
                num_classes: self.num_classes,
            });
        }
        self.class_labels = labels;
        Ok(self)
    }

    pub fn with_feature_fingerprint(mut self, fingerprint: u64) -> Self {
        self.feature_fingerprint = fingerprint;
        self
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn feature_fingerprint(&self) -> u64 {
        self.feature_fingerprint
    }

    fn check_dim(&self, v: &SparseVector) -> Result<(), ClassifierError> {
        if v.dim() != self.dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        Ok(())
    }

    /// `W v + b`.
    pub fn logits(&self, v: &SparseVector) -> Result<Vec<f64>, ClassifierError> {
        self.check_dim(v)?;
        Ok(logits_scaled(&self.weights, &self.bias, 1.0, self.dim, v))
    }

    /// Softmax class probabilities.
    pub fn forward(&self, v: &SparseVector) -> Result<Vec<f64>, ClassifierError> {
        Ok(softmax(&self.logits(v)?))
    }

    /// Index of the most probable class, lowest index on ties.
    pub fn predict_index(&self, v: &SparseVector) -> Result<usize, ClassifierError> {
        Ok(argmax(&self.forward(v)?))
    }

    pub fn predict(&self, v: &SparseVector) -> Result<&str, ClassifierError> {
        Ok(&self.class_labels[self.predict_index(v)?])
    }
}

fn logits_scaled(weights: &[f64], bias: &[f64], scale: f64, dim: usize, v: &SparseVector) -> Vec<f64> {
    bias.iter()
        .enumerate()
        .map(|(c, &b)| {
            let row = &weights[c * dim..(c + 1) * dim];
            scale * v.iter().map(|(j, x)| row[j] * x).sum::<f64>() + b
        })
        .collect()
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// First index of the maximum.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Per-class coefficients `(p - onehot)` and the cross-entropy of one example.
fn example_terms(probs: &mut [f64], label: usize) -> f64 {
    let loss = -probs[label].max(f64::MIN_POSITIVE).ln();
    probs[label] -= 1.0;
    loss
}

fn check_examples(examples: &[(SparseVector, usize)], num_classes: usize, dim: usize) -> Result<(), ClassifierError> {
    for (v, y) in examples {
        if *y >= num_classes {
            return Err(ClassifierError::ClassIndexOutOfRange {
                index: *y,
                num_classes,
            });
        }
        if v.dim() != dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

/// Mean cross-entropy plus `l2 / 2 · ‖W‖²` (bias not regularized).
pub fn objective(model: &LinearModel, examples: &[(SparseVector, usize)], l2: f64) -> Result<f64, ClassifierError> {
    check_examples(examples, model.num_classes, model.dim)?;
    if examples.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let mut loss = 0.0;
    for (v, y) in examples {
        let p = model.forward(v)?;
        loss -= p[*y].ln();
    }
    let reg: f64 = model.weights.iter().map(|w| w * w).sum();
    Ok(loss / examples.len() as f64 + 0.5 * l2 * reg)
}

/// Analytic gradient of [`objective`]: dense `(dW, db)`, `dW` row-major.
pub fn gradient(model: &LinearModel, examples: &[(SparseVector, usize)], l2: f64) -> Result<(Vec<f64>, Vec<f64>), ClassifierError> {
    check_examples(examples, model.num_classes, model.dim)?;
    if examples.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let m = examples.len() as f64;
    let dim = model.dim;
    let mut dw: Vec<f64> = model.weights.iter().map(|w| l2 * w).collect();
    let mut db = vec![0.0; model.num_classes];
    for (v, y) in examples {
        let mut coef = model.forward(v)?;
        example_terms(&mut coef, *y);
        for (c, g) in coef.iter().enumerate() {
            db[c] += g / m;
            for (j, x) in v.iter() {
                dw[c * dim + j] += g * x / m;
            }
        }
    }
    Ok((dw, db))
}

fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(seed ^ splitmix(epoch as u64))
}

/// Model plus the mean training cross-entropy of each epoch.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: LinearModel,
    pub epoch_losses: Vec<f64>,
}

pub fn train(
    examples: &[(SparseVector, usize)],
    hp: &HyperParams,
    num_classes: usize,
    dim: usize,
) -> Result<LinearModel, ClassifierError> {
    train_with_log(examples, hp, num_classes, dim).map(|o| o.model)
}

/// Mini-batch SGD from zero weights.
///
/// Each epoch shuffles with a ChaCha8 stream seeded from `(rng_seed, epoch)`
/// and steps on the batch-averaged cross-entropy gradient plus `l2 · W`.
/// Weight decay is applied through a running scale factor so a step only
/// touches the features present in the batch.
pub fn train_with_log(
    examples: &[(SparseVector, usize)],
    hp: &HyperParams,
    num_classes: usize,
    dim: usize,
) -> Result<TrainOutcome, ClassifierError> {
    hp.validate()?;
    if examples.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let mut model = LinearModel::zeros(num_classes, dim)?;
    check_examples(examples, num_classes, dim)?;

    let lr = hp.learning_rate;
    let decay = 1.0 - lr * hp.l2;
    let mut scale = 1.0f64;
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(hp.epochs);
    let mut coefs: Vec<(usize, Vec<f64>)> = Vec::with_capacity(hp.batch_size);

    for epoch in 0..hp.epochs {
        order.sort_unstable();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(epoch_seed(hp.rng_seed, epoch)));
        let mut epoch_loss = 0.0;

        for batch in order.chunks(hp.batch_size) {
            let m = batch.len() as f64;
            coefs.clear();
            for &i in batch {
                let (v, y) = &examples[i];
                let mut p = softmax(&logits_scaled(&model.weights, &model.bias, scale, dim, v));
                epoch_loss += example_terms(&mut p, *y);
                coefs.push((i, p));
            }

            scale *= decay;
            let step = lr / (m * scale);
            let mut finite = true;
            for (i, coef) in &coefs {
                let v = &examples[*i].0;
                for (c, g) in coef.iter().enumerate() {
                    model.bias[c] -= lr * g / m;
                    let row = &mut model.weights[c * dim..(c + 1) * dim];
                    for (j, x) in v.iter() {
                        row[j] -= step * g * x;
                        finite &= row[j].is_finite();
                    }
                }
            }
            if !finite || model.bias.iter().any(|b| !b.is_finite()) {
                return Err(ClassifierError::Diverged { epoch });
            }
            if scale < 1e-6 {
                model.weights.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        epoch_losses.push(epoch_loss / examples.len() as f64);
    }
    if scale != 1.0 {
        model.weights.iter_mut().for_each(|w| *w *= scale);
    }
    Ok(TrainOutcome { model, epoch_losses })
}

const MODEL_MAGIC: &[u8; 8] = b"NADIMDL1";

impl LinearModel {
    /// Little-endian: magic, u32 classes, u32 dim, length-prefixed labels,
    /// row-major f64 weights, f64 biases, u64 feature fingerprint.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&(self.num_classes as u32).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        for label in &self.class_labels {
            w.write_all(&(label.len() as u32).to_le_bytes())?;
            w.write_all(label.as_bytes())?;
        }
        for x in self.weights.iter().chain(&self.bias) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(&self.feature_fingerprint.to_le_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        let io = |source| ClassifierError::Io {
            path: path.to_owned(),
            source,
        };
        let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        self.write_to(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        let bytes = std::fs::read(path).map_err(|source| ClassifierError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_bytes(&bytes).map_err(|reason| ClassifierError::BadFile {
            path: path.to_owned(),
            reason,
        })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, String> {
        fn u32_at(r: &mut &[u8]) -> Result<u32, String> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b).map_err(|_| "truncated")?;
            Ok(u32::from_le_bytes(b))
        }
        fn f64s(r: &mut &[u8], n: usize) -> Result<Vec<f64>, String> {
            if r.len() < n * 8 {
                return Err("truncated parameters".into());
            }
            let (head, tail) = r.split_at(n * 8);
            *r = tail;
            Ok(head
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect())
        }
        let mut magic = [0u8; 8];
        bytes.read_exact(&mut magic).map_err(|_| "truncated header")?;
        if &magic != MODEL_MAGIC {
            return Err("bad magic".into());
        }
        let num_classes = u32_at(&mut bytes)? as usize;
        let dim = u32_at(&mut bytes)? as usize;
        let mut labels = Vec::with_capacity(num_classes);
        for _ in 0..num_classes {
            let len = u32_at(&mut bytes)? as usize;
            if bytes.len() < len {
                return Err("truncated label table".into());
            }
            let (l, rest) = bytes.split_at(len);
            labels.push(String::from_utf8(l.to_vec()).map_err(|_| "label is not UTF-8")?);
            bytes = rest;
        }
        let weights = f64s(&mut bytes, num_classes * dim)?;
        let bias = f64s(&mut bytes, num_classes)?;
        let mut fp = [0u8; 8];
        bytes.read_exact(&mut fp).map_err(|_| "missing feature fingerprint")?;
        if !bytes.is_empty() {
            return Err("trailing bytes".into());
        }
        Ok(LinearModel::from_parts(num_classes, dim, weights, bias)
            .and_then(|m| m.with_labels(labels))
            .map_err(|e| e.to_string())?
            .with_feature_fingerprint(u64::from_le_bytes(fp)))
    }
}
