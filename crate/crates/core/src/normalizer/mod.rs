//! Tweet normalization.
//!
//! Stages run in a fixed order: markup stripping, entity replacement, noise
//! removal, spacing insertion, whitespace collapse and (optionally) clitic
//! segmentation. Any stage can be switched off through [`NormConfig`]; the
//! whitespace collapse always runs.
//!
//! Placeholder tokens (`[رابط]`, `[بريد]`, `[مستخدم]`) are recognised by
//! their exact surface wherever they occur and are treated as opaque by
//! every later stage.

mod charclass;
mod entities;
mod markup;
mod noise;
mod placeholder;
mod segment;
mod spacing;

pub use charclass::{
    is_allowed, is_arabic_diacritic, is_arabic_indic_digit, is_arabic_letter, is_arabic_word_char,
    is_digit,
};
pub use entities::replace_entities;
pub use markup::strip_markup;
pub use noise::remove_noise;
pub use placeholder::{count_placeholders, Placeholder};
pub use segment::{segment, LexiconError, SegmentLexicon, Segmenter};
pub use spacing::insert_spacing;

use serde::{Deserialize, Serialize};

/// Stage toggles. Everything is on by default except segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormConfig {
    pub segment: bool,
    pub strip_markup: bool,
    pub replace_entities: bool,
    pub remove_noise: bool,
    pub insert_spacing: bool,
    /// Longest run of one character kept by noise removal. Must be ≥ 1.
    pub max_repeat: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self {
            segment: false,
            strip_markup: true,
            replace_entities: true,
            remove_noise: true,
            insert_spacing: true,
            max_repeat: 2,
        }
    }
}

impl NormConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_repeat == 0 {
            return Err("max_repeat must be at least 1".into());
        }
        Ok(())
    }
}

/// Collapse every whitespace run to one space and trim both ends.
pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A configured pipeline. Cheap to share across threads.
#[derive(Debug, Clone, Default)]
pub struct Normalizer {
    config: NormConfig,
    segmenter: Segmenter,
}

impl Normalizer {
    /// # Panics
    ///
    /// If `config.max_repeat` is zero.
    pub fn new(config: NormConfig) -> Self {
        Self::with_segmenter(config, Segmenter::default())
    }

    pub fn with_segmenter(config: NormConfig, segmenter: Segmenter) -> Self {
        assert!(config.max_repeat >= 1, "max_repeat must be at least 1");
        Self { config, segmenter }
    }

    pub fn config(&self) -> &NormConfig {
        &self.config
    }

    pub fn segmenter(&self) -> &Segmenter {
        &self.segmenter
    }

    pub fn normalize(&self, text: &str) -> String {
        let c = &self.config;
        let mut s = if c.strip_markup {
            strip_markup(text)
        } else {
            text.to_owned()
        };
        if c.replace_entities {
            s = replace_entities(&s);
        }
        if c.remove_noise {
            s = remove_noise(&s, c.max_repeat);
            // Dropping characters can complete a link (`ht😀tp://`), so
            // look again on the cleaned text.
            if c.replace_entities {
                s = replace_entities(&s);
            }
        }
        if c.insert_spacing {
            s = insert_spacing(&s);
        }
        s = collapse_whitespace(&s);
        if c.segment {
            s = self.segmenter.segment(&s);
        }
        s
    }

    /// Normalize a batch, preserving order.
    pub fn normalize_all<'a>(&self, texts: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        texts.into_iter().map(|t| self.normalize(t)).collect()
    }
}

/// Normalize with the bundled segmentation lexicon.
pub fn normalize(text: &str, config: &NormConfig) -> String {
    Normalizer::new(*config).normalize(text)
}
