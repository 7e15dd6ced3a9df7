//! Hashed character n-gram TF-IDF features.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("invalid feature config: {0}")]
    InvalidConfig(String),
    #[error("cannot fit idf on an empty corpus")]
    EmptyCorpus,
    #[error("idf table has dim {found}, config expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{}: not an idf table ({reason})", path.display())]
    BadFile { path: PathBuf, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Hash space size, a power of two.
    pub dim: usize,
    pub seed: u64,
    pub pad_token: char,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 5,
            dim: 1 << 18,
            seed: 0,
            pad_token: '_',
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |m: String| Err(FeatureError::InvalidConfig(m));
        if !(1 <= self.n_min && self.n_min <= self.n_max && self.n_max <= 8) {
            return bad(format!(
                "need 1 <= n_min <= n_max <= 8, got {}..{}",
                self.n_min, self.n_max
            ));
        }
        if self.dim < 2 || !self.dim.is_power_of_two() || self.dim > u32::MAX as usize {
            return bad(format!("dim must be a power of two >= 2, got {}", self.dim));
        }
        Ok(())
    }

    /// Stable 64-bit identity of this config, stored with trained models.
    pub fn fingerprint(&self) -> u64 {
        fnv1a(
            format!(
                "n_min={};n_max={};dim={};seed={};pad={}",
                self.n_min, self.n_max, self.dim, self.seed, self.pad_token as u32
            )
            .as_bytes(),
        )
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Bucket of an n-gram: FNV-1a of its UTF-8 bytes, XORed with the seed,
/// high half folded onto the low half, masked to `dim`.
pub fn hash_index(gram: &str, config: &FeatureConfig) -> usize {
    let h = fnv1a(gram.as_bytes()) ^ config.seed;
    let folded = h ^ (h >> 32);
    (folded & (config.dim as u64 - 1)) as usize
}

/// Call `f` on every n-gram of `text`. Each whitespace-delimited token is
/// padded with one `pad_token` on each side.
pub fn for_each_ngram(text: &str, config: &FeatureConfig, mut f: impl FnMut(&str)) {
    let mut padded = String::new();
    let mut bounds: Vec<usize> = Vec::new();
    for token in text.split_whitespace() {
        padded.clear();
        padded.push(config.pad_token);
        padded.push_str(token);
        padded.push(config.pad_token);
        bounds.clear();
        bounds.extend(padded.char_indices().map(|(i, _)| i));
        bounds.push(padded.len());
        let chars = bounds.len() - 1;
        for n in config.n_min..=config.n_max.min(chars) {
            for start in 0..=chars - n {
                f(&padded[bounds[start]..bounds[start + n]]);
            }
        }
    }
}

/// N-gram multiset of `text`.
pub fn char_ngrams(text: &str, config: &FeatureConfig) -> BTreeMap<String, usize> {
    let mut bag = BTreeMap::new();
    for_each_ngram(text, config, |g| *bag.entry(g.to_owned()).or_insert(0) += 1);
    bag
}

/// Hashed term counts, sorted by index.
pub fn hashed_counts(text: &str, config: &FeatureConfig) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for_each_ngram(text, config, |g| *counts.entry(hash_index(g, config)).or_insert(0.0) += 1.0);
    counts.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdfTable {
    weights: Vec<f64>,
    doc_count: u64,
}

const IDF_MAGIC: &[u8; 8] = b"NADIIDF1";

impl IdfTable {
    pub fn from_parts(weights: Vec<f64>, doc_count: u64) -> Self {
        Self { weights, doc_count }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn doc_count(&self) -> u64 {
        self.doc_count
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(IDF_MAGIC)?;
        w.write_all(&(self.weights.len() as u32).to_le_bytes())?;
        w.write_all(&self.doc_count.to_le_bytes())?;
        for x in &self.weights {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), FeatureError> {
        let io = |source| FeatureError::Io {
            path: path.to_owned(),
            source,
        };
        let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        self.write_to(&mut w).map_err(io)?;
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, FeatureError> {
        let bytes = std::fs::read(path).map_err(|source| FeatureError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_bytes(&bytes).map_err(|reason| FeatureError::BadFile {
            path: path.to_owned(),
            reason,
        })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self, String> {
        let mut magic = [0u8; 8];
        bytes.read_exact(&mut magic).map_err(|_| "truncated header")?;
        if &magic != IDF_MAGIC {
            return Err("bad magic".into());
        }
        let mut u32b = [0u8; 4];
        let mut u64b = [0u8; 8];
        bytes.read_exact(&mut u32b).map_err(|_| "truncated header")?;
        let dim = u32::from_le_bytes(u32b) as usize;
        bytes.read_exact(&mut u64b).map_err(|_| "truncated header")?;
        let doc_count = u64::from_le_bytes(u64b);
        if bytes.len() != dim * 8 {
            return Err(format!("expected {} weight bytes, found {}", dim * 8, bytes.len()));
        }
        let weights = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(Self { weights, doc_count })
    }
}

/// IDF over documents given as iterators of n-grams (repeats allowed).
/// `weight = ln((1 + N) / (1 + df)) + 1`.
pub fn fit_idf<D, G, S>(corpus: D, config: &FeatureConfig) -> Result<IdfTable, FeatureError>
where
    D: IntoIterator<Item = G>,
    G: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    config.validate()?;
    let mut df = vec![0u64; config.dim];
    let mut last_doc = vec![u64::MAX; config.dim];
    let mut n_docs = 0u64;
    for doc in corpus {
        for gram in doc {
            let j = hash_index(gram.as_ref(), config);
            if last_doc[j] != n_docs {
                last_doc[j] = n_docs;
                df[j] += 1;
            }
        }
        n_docs += 1;
    }
    if n_docs == 0 {
        return Err(FeatureError::EmptyCorpus);
    }
    let n = n_docs as f64;
    let weights = df
        .iter()
        .map(|&d| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    Ok(IdfTable {
        weights,
        doc_count: n_docs,
    })
}

/// Fit IDF directly on texts.
pub fn fit_idf_texts<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    config: &FeatureConfig,
) -> Result<IdfTable, FeatureError> {
    let docs = texts.into_iter().map(|t| {
        let mut grams = Vec::new();
        for_each_ngram(t, config, |g| grams.push(g.to_owned()));
        grams
    });
    fit_idf(docs, config)
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// # Panics
    ///
    /// If indices are not strictly increasing, out of range, or the lengths
    /// differ.
    pub fn new(dim: usize, indices: Vec<u32>, values: Vec<f64>) -> Self {
        assert_eq!(indices.len(), values.len());
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "indices must be strictly increasing");
        assert!(indices.last().is_none_or(|&i| (i as usize) < dim), "index out of range");
        Self { dim, indices, values }
    }

    pub fn empty(dim: usize) -> Self {
        Self::new(dim, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().map(|&i| i as usize).zip(self.values.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// TF-IDF vector of `text`, L2-normalized.
pub fn vectorize(text: &str, config: &FeatureConfig, idf: &IdfTable) -> Result<SparseVector, FeatureError> {
    if idf.dim() != config.dim {
        return Err(FeatureError::DimensionMismatch {
            expected: config.dim,
            found: idf.dim(),
        });
    }
    let (indices, mut values): (Vec<u32>, Vec<f64>) = hashed_counts(text, config)
        .into_iter()
        .map(|(j, tf)| (j as u32, tf * idf.weights[j]))
        .unzip();
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        values.iter_mut().for_each(|v| *v /= norm);
    }
    Ok(SparseVector::new(config.dim, indices, values))
}
