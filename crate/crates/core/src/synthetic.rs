//! Deterministic synthetic corpora for smoke tests and benchmarks.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{write_corpus, ColumnSchema, CorpusError, LabelVocab, Register, TweetRecord};

/// Four artificial dialects, each writing only with its own seven letters.
pub const DIALECTS: [(&str, [&str; 2], &str); 4] = [
    ("Egypt", ["Cairo", "Alexandria"], "ابتثجحخ"),
    ("Iraq", ["Baghdad", "Basra"], "دذرزسشص"),
    ("Morocco", ["Rabat", "Fes"], "ضطظعغفق"),
    ("Oman", ["Muscat", "Dhofar"], "كلمنهوي"),
];

/// DA training-split counts per country from the shared-task distribution
/// table (21,000 tweets in total).
pub const DA_TRAIN_COUNTS: [(&str, usize); 21] = [
    ("Algeria", 1809),
    ("Bahrain", 215),
    ("Djibouti", 215),
    ("Egypt", 4283),
    ("Iraq", 2729),
    ("Jordan", 429),
    ("Kuwait", 429),
    ("Lebanon", 644),
    ("Libya", 1286),
    ("Mauritania", 215),
    ("Morocco", 858),
    ("Oman", 1501),
    ("Palestine", 428),
    ("Qatar", 215),
    ("Saudi_Arabia", 2140),
    ("Somalia", 172),
    ("Sudan", 215),
    ("Syria", 1287),
    ("Tunisia", 859),
    ("UAE", 642),
    ("Yemen", 429),
];

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub train: Vec<TweetRecord>,
    pub dev: Vec<TweetRecord>,
    pub test: Vec<TweetRecord>,
    pub vocab: LabelVocab,
}

pub fn dialect_vocab() -> LabelVocab {
    LabelVocab::from_pairs(
        DIALECTS
            .iter()
            .flat_map(|(c, ps, _)| ps.iter().map(move |p| (p.to_string(), c.to_string()))),
    )
    .expect("static vocab is consistent")
}

fn word(rng: &mut impl Rng, letters: &[char]) -> String {
    let len = rng.gen_range(2..=6);
    (0..len).map(|_| *letters.choose(rng).expect("non-empty")).collect()
}

fn tweet(rng: &mut impl Rng, letters: &[char], shared: &[char]) -> String {
    let mut parts: Vec<String> = Vec::new();
    if rng.gen_bool(0.3) {
        parts.push(format!("@user{}", rng.gen_range(0..1000)));
    }
    let n = rng.gen_range(4..=10);
    for _ in 0..n {
        // occasional word from any inventory, so classes share some n-grams
        if rng.gen_bool(0.1) {
            parts.push(word(rng, shared));
        } else {
            parts.push(word(rng, letters));
        }
    }
    if rng.gen_bool(0.2) {
        parts.push(format!("{}", rng.gen_range(1..3000)));
    }
    if rng.gen_bool(0.2) {
        parts.push("😂😂".to_owned());
    }
    if rng.gen_bool(0.2) {
        parts.push(format!("https://t.co/{:x}", rng.gen::<u32>()));
    }
    parts.join(" ")
}

/// Balanced four-dialect corpus with `per_class` records per class in each
/// of train, dev and test. Classes are interleaved.
pub fn four_dialects(seed: u64, per_class: [usize; 3], register: Register) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared: Vec<char> = DIALECTS.iter().flat_map(|d| d.2.chars()).collect();
    let mut splits: [Vec<TweetRecord>; 3] = Default::default();
    for (split, (&n, prefix)) in per_class.iter().zip(["tr", "dv", "ts"]).enumerate() {
        for i in 0..n * DIALECTS.len() {
            let (country, provinces, letters) = DIALECTS[i % DIALECTS.len()];
            let letters: Vec<char> = letters.chars().collect();
            splits[split].push(TweetRecord {
                id: format!("{prefix}{i:05}"),
                text: tweet(&mut rng, &letters, &shared),
                country: Some(country.to_owned()),
                province: Some(provinces[rng.gen_range(0..2)].to_owned()),
                register,
            });
        }
    }
    let [train, dev, test] = splits;
    SyntheticCorpus {
        train,
        dev,
        test,
        vocab: dialect_vocab(),
    }
}

/// Country-labeled records with exactly [`DA_TRAIN_COUNTS`] per country.
pub fn da_train_distribution(seed: u64) -> Vec<TweetRecord> {
    let mut labels: Vec<&str> = DA_TRAIN_COUNTS
        .iter()
        .flat_map(|&(c, n)| std::iter::repeat_n(c, n))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    labels.shuffle(&mut rng);
    labels
        .into_iter()
        .enumerate()
        .map(|(i, c)| TweetRecord {
            id: format!("da{i:05}"),
            text: format!("تغريدة رقم {i}"),
            country: Some(c.to_owned()),
            province: None,
            register: Register::Da,
        })
        .collect()
}

/// Write `train.tsv`, `dev.tsv`, `test.tsv` and `vocab.tsv` into `dir`.
pub fn write_synthetic(corpus: &SyntheticCorpus, dir: &Path) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let schema = ColumnSchema::default();
    write_corpus(&corpus.train, &schema, &dir.join("train.tsv"))?;
    write_corpus(&corpus.dev, &schema, &dir.join("dev.tsv"))?;
    write_corpus(&corpus.test, &schema, &dir.join("test.tsv"))?;
    let mut vocab = String::new();
    for p in corpus.vocab.provinces() {
        vocab.push_str(&format!("{p}\t{}\n", corpus.vocab.country_of(p).expect("known")));
    }
    let path = dir.join("vocab.tsv");
    std::fs::write(&path, vocab).map_err(|source| CorpusError::Io { path, source })
}
