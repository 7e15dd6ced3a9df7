use std::collections::HashMap;
use std::path::Path;

use super::charclass::{is_arabic_letter, is_arabic_word_char};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: entry outside a [prefixes] or [suffixes] section")]
    NoSection { line: usize },
    #[error("lexicon line {line}: unknown section {name:?}")]
    UnknownSection { line: usize, name: String },
    #[error("lexicon entries must not be empty")]
    EmptyEntry,
    #[error("min_stem_len must be at least 1")]
    ZeroStem,
    #[error("presegmented table line {line}: expected `raw<TAB>segmented`")]
    MalformedOverride { line: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Prefix and suffix clitics for the longest-match segmenter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLexicon {
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    min_stem_len: usize,
}

const DEFAULT_PREFIXES: &[&str] = &["و", "ف", "ب", "ك", "ل", "ال", "وال", "بال", "فال", "كال", "لل"];
const DEFAULT_SUFFIXES: &[&str] = &["ها", "هم", "كم", "نا", "ك", "ه", "ي", "ات", "ون", "ين"];

impl Default for SegmentLexicon {
    fn default() -> Self {
        Self::new(
            DEFAULT_PREFIXES.iter().map(|s| s.to_string()),
            DEFAULT_SUFFIXES.iter().map(|s| s.to_string()),
            2,
        )
        .expect("bundled lexicon is valid")
    }
}

fn longest_first(mut v: Vec<String>) -> Vec<String> {
    v.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then_with(|| a.cmp(b)));
    v.dedup();
    v
}

impl SegmentLexicon {
    pub fn new(
        prefixes: impl IntoIterator<Item = String>,
        suffixes: impl IntoIterator<Item = String>,
        min_stem_len: usize,
    ) -> Result<Self, LexiconError> {
        if min_stem_len == 0 {
            return Err(LexiconError::ZeroStem);
        }
        let prefixes: Vec<String> = prefixes.into_iter().collect();
        let suffixes: Vec<String> = suffixes.into_iter().collect();
        if prefixes.iter().chain(&suffixes).any(String::is_empty) {
            return Err(LexiconError::EmptyEntry);
        }
        Ok(Self {
            prefixes: longest_first(prefixes),
            suffixes: longest_first(suffixes),
            min_stem_len,
        })
    }

    /// Parse the sectioned text format:
    ///
    /// ```text
    /// # comment
    /// [prefixes]
    /// وال
    /// [suffixes]
    /// ها
    /// ```
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        enum Section {
            None,
            Prefixes,
            Suffixes,
        }
        let mut section = Section::None;
        let (mut prefixes, mut suffixes) = (Vec::new(), Vec::new());
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name.trim() {
                    "prefixes" => Section::Prefixes,
                    "suffixes" => Section::Suffixes,
                    other => {
                        return Err(LexiconError::UnknownSection {
                            line: idx + 1,
                            name: other.to_owned(),
                        })
                    }
                };
                continue;
            }
            match section {
                Section::None => return Err(LexiconError::NoSection { line: idx + 1 }),
                Section::Prefixes => prefixes.push(line.to_owned()),
                Section::Suffixes => suffixes.push(line.to_owned()),
            }
        }
        Self::new(prefixes, suffixes, 2)
    }

    pub fn from_file(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn with_min_stem_len(mut self, min_stem_len: usize) -> Result<Self, LexiconError> {
        if min_stem_len == 0 {
            return Err(LexiconError::ZeroStem);
        }
        self.min_stem_len = min_stem_len;
        Ok(self)
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn min_stem_len(&self) -> usize {
        self.min_stem_len
    }

    /// Split one token into `(prefix, stem, suffix)`.
    pub fn split<'a>(&self, token: &'a str) -> (Option<&'a str>, &'a str, Option<&'a str>) {
        let min = self.min_stem_len;
        let mut stem = token;
        let mut prefix = None;
        for p in &self.prefixes {
            if let Some(rest) = stem.strip_prefix(p.as_str()) {
                if rest.chars().count() >= min {
                    prefix = Some(&token[..p.len()]);
                    stem = rest;
                    break;
                }
            }
        }
        let mut suffix = None;
        for s in &self.suffixes {
            if let Some(rest) = stem.strip_suffix(s.as_str()) {
                if rest.chars().count() >= min {
                    suffix = Some(&stem[rest.len()..]);
                    stem = rest;
                    break;
                }
            }
        }
        (prefix, stem, suffix)
    }
}

/// Clitic segmenter: an optional table of externally segmented tokens
/// consulted first, then the longest-match lexicon.
#[derive(Debug, Clone, Default)]
pub struct Segmenter {
    lexicon: SegmentLexicon,
    overrides: HashMap<String, String>,
}

impl Segmenter {
    pub fn new(lexicon: SegmentLexicon) -> Self {
        Self {
            lexicon,
            overrides: HashMap::new(),
        }
    }

    /// Load `raw_token<TAB>segmented_token` pairs.
    pub fn with_overrides_tsv(mut self, text: &str) -> Result<Self, LexiconError> {
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (raw, seg) = line
                .split_once('\t')
                .filter(|(r, s)| !r.is_empty() && !s.is_empty() && !s.contains('\t'))
                .ok_or(LexiconError::MalformedOverride { line: idx + 1 })?;
            self.overrides.insert(raw.to_owned(), seg.to_owned());
        }
        Ok(self)
    }

    pub fn with_overrides_file(self, path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_owned(),
            source,
        })?;
        self.with_overrides_tsv(&text)
    }

    pub fn lexicon(&self) -> &SegmentLexicon {
        &self.lexicon
    }

    /// Override table sorted by raw token.
    pub fn overrides(&self) -> Vec<(&str, &str)> {
        let mut v: Vec<(&str, &str)> = self
            .overrides
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        v.sort_unstable();
        v
    }

    /// Segment every eligible Arabic token. Tokens are re-joined with single
    /// spaces.
    pub fn segment(&self, text: &str) -> String {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let mut out: Vec<String> = Vec::with_capacity(tokens.len());
        for (i, &tok) in tokens.iter().enumerate() {
            // Neighbours carrying a `+` marker mean the token is a stem that
            // has already been split off; leave it alone.
            let after_prefix = i > 0 && tokens[i - 1].ends_with('+');
            let before_suffix = tokens.get(i + 1).is_some_and(|t| t.starts_with('+'));
            if after_prefix || before_suffix || !is_arabic_token(tok) {
                out.push(tok.to_owned());
                continue;
            }
            if let Some(seg) = self.overrides.get(tok) {
                out.push(seg.clone());
                continue;
            }
            let (prefix, stem, suffix) = self.lexicon.split(tok);
            if let Some(p) = prefix {
                out.push(format!("{p}+"));
            }
            out.push(stem.to_owned());
            if let Some(s) = suffix {
                out.push(format!("+{s}"));
            }
        }
        out.join(" ")
    }
}

fn is_arabic_token(tok: &str) -> bool {
    tok.chars().all(is_arabic_word_char) && tok.chars().any(is_arabic_letter)
}

/// Segment with the given lexicon and no override table.
pub fn segment(text: &str, lexicon: &SegmentLexicon) -> String {
    Segmenter::new(lexicon.clone()).segment(text)
}
