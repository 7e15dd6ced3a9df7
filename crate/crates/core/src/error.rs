use std::path::PathBuf;

use crate::classifier::ClassifierError;
use crate::corpus::CorpusError;
use crate::evaluation::EvalError;
use crate::features::FeatureError;
use crate::harness::HarnessError;
use crate::normalizer::LexiconError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error, wrapping the error type of every module.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
