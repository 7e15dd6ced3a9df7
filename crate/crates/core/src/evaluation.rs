//! Confusion matrix and the shared-task metric suite.
//!
//! Any ratio with a zero denominator is 0. Macro averages run over every
//! class in the vocabulary, including classes with no gold support.

use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{gold} gold labels but {pred} predictions")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("label {0:?} is not in the vocabulary")]
    UnknownLabel(String),
    #[error("nothing to evaluate")]
    EmptyMatrix,
    #[error("report line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Rows are gold classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    /// # Panics
    ///
    /// If `counts` is not square with one row per label.
    pub fn from_counts(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Self {
        assert_eq!(labels.len(), counts.len());
        assert!(counts.iter().all(|r| r.len() == labels.len()));
        Self { labels, counts }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|i| self.counts[i][i]).sum()
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }
}

pub fn confusion<G: AsRef<str>, P: AsRef<str>, V: AsRef<str>>(
    gold: &[G],
    pred: &[P],
    vocab: &[V],
) -> Result<ConfusionMatrix, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::EmptyMatrix);
    }
    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_ref(), i))
        .collect();
    let lookup = |l: &str| index.get(l).copied().ok_or_else(|| EvalError::UnknownLabel(l.to_owned()));
    let k = vocab.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (g, p) in gold.iter().zip(pred) {
        counts[lookup(g.as_ref())?][lookup(p.as_ref())?] += 1;
    }
    Ok(ConfusionMatrix {
        labels: vocab.iter().map(|l| l.as_ref().to_owned()).collect(),
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn per_class_prf(m: &ConfusionMatrix) -> Vec<ClassScores> {
    (0..m.num_classes())
        .map(|i| {
            let tp = m.counts[i][i] as f64;
            let support = m.row_sum(i);
            let precision = ratio(tp, m.col_sum(i) as f64);
            let recall = ratio(tp, support as f64);
            let f1 = ratio(2.0 * precision * recall, precision + recall);
            ClassScores {
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    ratio(sum, n as f64)
}

/// Unweighted mean of per-class F1 over all vocabulary classes.
pub fn macro_f1(m: &ConfusionMatrix) -> f64 {
    mean(per_class_prf(m).into_iter().map(|s| s.f1))
}

/// Support-weighted mean of per-class F1.
pub fn weighted_f1(m: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let sum: f64 = per_class_prf(m).iter().map(|s| s.f1 * s.support as f64).sum();
    Ok(sum / total as f64)
}

pub fn accuracy(m: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = m.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    Ok(m.trace() as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub per_class: Vec<(String, ClassScores)>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub accuracy: f64,
}

impl EvaluationReport {
    pub fn from_matrix(m: &ConfusionMatrix) -> Result<Self, EvalError> {
        let scores = per_class_prf(m);
        Ok(Self {
            macro_f1: mean(scores.iter().map(|s| s.f1)),
            weighted_f1: weighted_f1(m)?,
            macro_precision: mean(scores.iter().map(|s| s.precision)),
            macro_recall: mean(scores.iter().map(|s| s.recall)),
            accuracy: accuracy(m)?,
            per_class: m.labels.iter().cloned().zip(scores).collect(),
        })
    }

    /// Per-class TSV rows, a blank line, then `key<TAB>value` aggregates.
    ///
    /// Floats are written in shortest round-trip form so [`Self::parse`]
    /// recovers identical values.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("label\tprecision\trecall\tf1\tsupport\n");
        for (label, c) in &self.per_class {
            let _ = writeln!(s, "{label}\t{:?}\t{:?}\t{:?}\t{}", c.precision, c.recall, c.f1, c.support);
        }
        s.push('\n');
        for (key, v) in self.aggregates() {
            let _ = writeln!(s, "{key}\t{v:?}");
        }
        s
    }

    pub fn aggregates(&self) -> [(&'static str, f64); 5] {
        [
            ("macro_f1", self.macro_f1),
            ("accuracy", self.accuracy),
            ("macro_precision", self.macro_precision),
            ("macro_recall", self.macro_recall),
            ("weighted_f1", self.weighted_f1),
        ]
    }

    /// One-row summary in the shared-task column order: M-F1, A, P, R.
    pub fn summary(&self) -> String {
        format!(
            "M-F1 {:.3}  A {:.3}  P {:.3}  R {:.3}  (weighted F1 {:.3})",
            self.macro_f1, self.accuracy, self.macro_precision, self.macro_recall, self.weighted_f1
        )
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let err = |line: usize, reason: &str| EvalError::Parse {
            line,
            reason: reason.to_owned(),
        };
        let num = |line: usize, s: &str| s.parse::<f64>().map_err(|_| err(line, "bad number"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, h)) if h.starts_with("label\t") => {}
            _ => return Err(err(1, "missing header")),
        }
        let mut per_class = Vec::new();
        for (n, line) in lines.by_ref() {
            if line.is_empty() {
                break;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 5 {
                return Err(err(n, "expected 5 columns"));
            }
            per_class.push((
                f[0].to_owned(),
                ClassScores {
                    precision: num(n, f[1])?,
                    recall: num(n, f[2])?,
                    f1: num(n, f[3])?,
                    support: f[4].parse().map_err(|_| err(n, "bad support"))?,
                },
            ));
        }
        let mut agg: HashMap<&str, f64> = HashMap::new();
        for (n, line) in lines {
            let (k, v) = line.split_once('\t').ok_or_else(|| err(n, "expected key<TAB>value"))?;
            agg.insert(k, num(n, v)?);
        }
        let get = |k: &str| agg.get(k).copied().ok_or_else(|| err(0, &format!("missing {k}")));
        Ok(Self {
            per_class,
            macro_f1: get("macro_f1")?,
            weighted_f1: get("weighted_f1")?,
            macro_precision: get("macro_precision")?,
            macro_recall: get("macro_recall")?,
            accuracy: get("accuracy")?,
        })
    }
}

pub fn report<G: AsRef<str>, P: AsRef<str>, V: AsRef<str>>(
    gold: &[G],
    pred: &[P],
    vocab: &[V],
) -> Result<EvaluationReport, EvalError> {
    EvaluationReport::from_matrix(&confusion(gold, pred, vocab)?)
}
