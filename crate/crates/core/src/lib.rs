//! Arabic tweet dialect identification.
//!
//! The crate is organised as a pipeline:
//!
//! * [`normalizer`] cleans raw tweets (markup, URLs/emails/mentions, emoji,
//!   repeated characters, digit/Latin spacing, optional clitic segmentation).
//! * [`corpus`] loads shared-task TSV files, owns the country/province label
//!   hierarchy and writes submission files.
//! * [`features`] turns normalized text into hashed TF-IDF character n-gram
//!   vectors.
//! * [`classifier`] is a multinomial logistic regression trained with
//!   mini-batch SGD.
//! * [`evaluation`] computes the confusion matrix and P/R/F1/accuracy metrics.
//! * [`harness`] runs a grid of experiment configurations, selects on dev,
//!   refits on train+dev and predicts the test split.

pub mod classifier;
pub mod cli;
pub mod corpus;
mod error;
pub mod evaluation;
pub mod features;
pub mod harness;
pub mod normalizer;
pub mod synthetic;

pub use error::{Error, Result};
