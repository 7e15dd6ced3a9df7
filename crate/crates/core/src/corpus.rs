//! Shared-task corpus files, the country/province label hierarchy and
//! submission output.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}:{line}: expected {expected} columns, found {found}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{}:{line}: empty id", path.display())]
    EmptyId { path: PathBuf, line: usize },
    #[error("unknown {level} label {label:?}")]
    UnknownLabel { level: Level, label: String },
    #[error("province {province:?} belongs to {expected:?}, record says {found:?}")]
    HierarchyViolation {
        province: String,
        expected: String,
        found: Option<String>,
    },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("record {id:?} has no {level} label")]
    UnlabeledRecord { id: String, level: Level },
    #[error("{ids} ids but {labels} labels")]
    LengthMismatch { ids: usize, labels: usize },
    #[error("vocab line {line}: expected `province<TAB>country`")]
    MalformedVocab { line: usize },
    #[error("province {province:?} mapped to both {first:?} and {second:?}")]
    ConflictingProvince {
        province: String,
        first: String,
        second: String,
    },
    #[error("field of record {id:?} contains a tab or newline")]
    UnwritableField { id: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    Msa,
    Da,
}

impl FromStr for Register {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "msa" => Ok(Register::Msa),
            "da" => Ok(Register::Da),
            _ => Err(format!("unknown register {s:?} (expected msa or da)")),
        }
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Register::Msa => "MSA",
            Register::Da => "DA",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Country,
    Province,
}

impl FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "country" => Ok(Level::Country),
            "province" => Ok(Level::Province),
            _ => Err(format!("unknown level {s:?} (expected country or province)")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Country => "country",
            Level::Province => "province",
        })
    }
}

/// One of the four shared-task subtasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subtask {
    pub level: Level,
    pub register: Register,
}

impl Subtask {
    pub const ALL: [Subtask; 4] = [
        Subtask::new(Level::Country, Register::Msa),
        Subtask::new(Level::Country, Register::Da),
        Subtask::new(Level::Province, Register::Msa),
        Subtask::new(Level::Province, Register::Da),
    ];

    pub const fn new(level: Level, register: Register) -> Self {
        Self { level, register }
    }

    /// Shared-task numbering, e.g. `"1.2"` for country-level DA.
    pub fn code(&self) -> &'static str {
        match (self.level, self.register) {
            (Level::Country, Register::Msa) => "1.1",
            (Level::Country, Register::Da) => "1.2",
            (Level::Province, Register::Msa) => "2.1",
            (Level::Province, Register::Da) => "2.2",
        }
    }
}

impl FromStr for Subtask {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Subtask::ALL
            .into_iter()
            .find(|t| t.code() == s)
            .ok_or_else(|| format!("unknown subtask {s:?} (expected 1.1, 1.2, 2.1 or 2.2)"))
    }
}

impl fmt::Display for Subtask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} {})", self.code(), self.level, self.register)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub id: String,
    pub text: String,
    pub country: Option<String>,
    pub province: Option<String>,
    pub register: Register,
}

impl TweetRecord {
    pub fn label(&self, level: Level) -> Option<&str> {
        match level {
            Level::Country => self.country.as_deref(),
            Level::Province => self.province.as_deref(),
        }
    }
}

/// The 21 countries of the shared task, in the order of its
/// country-level distribution table.
pub const COUNTRIES: [&str; 21] = [
    "Algeria",
    "Bahrain",
    "Djibouti",
    "Egypt",
    "Iraq",
    "Jordan",
    "Kuwait",
    "Lebanon",
    "Libya",
    "Mauritania",
    "Morocco",
    "Oman",
    "Palestine",
    "Qatar",
    "Saudi_Arabia",
    "Somalia",
    "Sudan",
    "Syria",
    "Tunisia",
    "UAE",
    "Yemen",
];

/// Country and province label spaces with the province→country map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVocab {
    countries: Vec<String>,
    provinces: Vec<String>,
    province_to_country: HashMap<String, String>,
}

impl Default for LabelVocab {
    /// The bundled country list, without provinces.
    fn default() -> Self {
        Self::countries_only(COUNTRIES.iter().map(|s| s.to_string()))
    }
}

impl LabelVocab {
    pub fn countries_only(countries: impl IntoIterator<Item = String>) -> Self {
        let mut seen = HashSet::new();
        let countries = countries.into_iter().filter(|c| seen.insert(c.clone())).collect();
        Self {
            countries,
            provinces: Vec::new(),
            province_to_country: HashMap::new(),
        }
    }

    /// Build from `(province, country)` pairs. Labels are indexed in order of
    /// first appearance.
    pub fn from_pairs<I, P, C>(pairs: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (P, C)>,
        P: Into<String>,
        C: Into<String>,
    {
        let mut vocab = LabelVocab::countries_only(std::iter::empty());
        let mut known_countries = HashSet::new();
        for (province, country) in pairs {
            let (province, country) = (province.into(), country.into());
            if let Some(prev) = vocab.province_to_country.get(&province) {
                if *prev != country {
                    return Err(CorpusError::ConflictingProvince {
                        province,
                        first: prev.clone(),
                        second: country,
                    });
                }
                continue;
            }
            if known_countries.insert(country.clone()) {
                vocab.countries.push(country.clone());
            }
            vocab.provinces.push(province.clone());
            vocab.province_to_country.insert(province, country);
        }
        Ok(vocab)
    }

    /// Parse `province<TAB>country` lines. Blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(p), Some(c), None) if !p.is_empty() && !c.is_empty() => {
                    pairs.push((p.to_owned(), c.to_owned()))
                }
                _ => return Err(CorpusError::MalformedVocab { line: idx + 1 }),
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    pub fn countries(&self) -> &[String] {
        &self.countries
    }

    pub fn provinces(&self) -> &[String] {
        &self.provinces
    }

    pub fn labels(&self, level: Level) -> &[String] {
        match level {
            Level::Country => &self.countries,
            Level::Province => &self.provinces,
        }
    }

    pub fn has_provinces(&self) -> bool {
        !self.provinces.is_empty()
    }

    pub fn country_of(&self, province: &str) -> Option<&str> {
        self.province_to_country.get(province).map(String::as_str)
    }

    pub fn index_of(&self, level: Level, label: &str) -> Option<usize> {
        self.labels(level).iter().position(|l| l == label)
    }

    /// Check a record's labels against this vocab.
    pub fn validate(&self, record: &TweetRecord) -> Result<(), CorpusError> {
        if let Some(country) = &record.country {
            if self.index_of(Level::Country, country).is_none() {
                return Err(CorpusError::UnknownLabel {
                    level: Level::Country,
                    label: country.clone(),
                });
            }
        }
        if let Some(province) = &record.province {
            let expected = self.country_of(province).ok_or_else(|| CorpusError::UnknownLabel {
                level: Level::Province,
                label: province.clone(),
            })?;
            if record.country.as_deref() != Some(expected) {
                return Err(CorpusError::HierarchyViolation {
                    province: province.clone(),
                    expected: expected.to_owned(),
                    found: record.country.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Column names used to find fields in a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnSchema {
    pub id: String,
    pub text: String,
    pub country: String,
    pub province: String,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            id: "id".into(),
            text: "tweet".into(),
            country: "country".into(),
            province: "province".into(),
        }
    }
}

struct ColumnMap {
    width: usize,
    id: usize,
    text: usize,
    country: Option<usize>,
    province: Option<usize>,
}

impl ColumnSchema {
    /// Resolve columns from a header line, if the line is one.
    fn resolve_header(&self, fields: &[&str]) -> Option<ColumnMap> {
        let find = |name: &str| fields.iter().position(|f| f.trim() == name);
        Some(ColumnMap {
            width: fields.len(),
            id: find(&self.id)?,
            text: find(&self.text)?,
            country: find(&self.country),
            province: find(&self.province),
        })
    }

    /// Headerless files are positional: id, text, then optional labels.
    fn positional(width: usize) -> ColumnMap {
        ColumnMap {
            width,
            id: 0,
            text: 1,
            country: (width > 2).then_some(2),
            province: (width > 3).then_some(3),
        }
    }
}

fn non_empty(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_owned())
}

/// Parse corpus text. `origin` only names the source in errors.
pub fn parse_corpus(
    text: &str,
    origin: &Path,
    schema: &ColumnSchema,
    register: Register,
    vocab: Option<&LabelVocab>,
) -> Result<Vec<TweetRecord>, CorpusError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let columns = match lines.peek() {
        None => return Ok(Vec::new()),
        Some(&(_, first)) => {
            let fields: Vec<&str> = first.split('\t').collect();
            match schema.resolve_header(&fields) {
                Some(map) => {
                    lines.next();
                    map
                }
                None => ColumnSchema::positional(fields.len().max(2)),
            }
        }
    };

    let mut seen = HashSet::new();
    let mut records = Vec::new();
    for (line, raw) in lines {
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != columns.width {
            return Err(CorpusError::MalformedRow {
                path: origin.to_owned(),
                line,
                expected: columns.width,
                found: fields.len(),
            });
        }
        let id = fields[columns.id].trim().to_owned();
        if id.is_empty() {
            return Err(CorpusError::EmptyId {
                path: origin.to_owned(),
                line,
            });
        }
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId(id));
        }
        let record = TweetRecord {
            id,
            text: fields[columns.text].to_owned(),
            country: columns.country.and_then(|i| non_empty(fields[i])),
            province: columns.province.and_then(|i| non_empty(fields[i])),
            register,
        };
        if let Some(vocab) = vocab {
            vocab.validate(&record)?;
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_corpus(
    path: &Path,
    schema: &ColumnSchema,
    register: Register,
    vocab: Option<&LabelVocab>,
) -> Result<Vec<TweetRecord>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_corpus(&text, path, schema, register, vocab)
}

/// Write records with a header row, labels left empty when absent.
pub fn write_corpus(
    records: &[TweetRecord],
    schema: &ColumnSchema,
    path: &Path,
) -> Result<(), CorpusError> {
    let mut out = String::new();
    out.push_str(&format!(
        "{}\t{}\t{}\t{}\n",
        schema.id, schema.text, schema.country, schema.province
    ));
    for r in records {
        let fields = [
            r.id.as_str(),
            r.text.as_str(),
            r.country.as_deref().unwrap_or(""),
            r.province.as_deref().unwrap_or(""),
        ];
        if fields.iter().any(|f| f.contains(['\t', '\n', '\r'])) {
            return Err(CorpusError::UnwritableField { id: r.id.clone() });
        }
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err(path))
}

/// Per-label counts for one split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusStats {
    pub level: Level,
    pub counts: Vec<(String, usize)>,
    pub total: usize,
}

impl CorpusStats {
    pub fn count(&self, label: &str) -> Option<usize> {
        self.counts.iter().find(|(l, _)| l == label).map(|&(_, n)| n)
    }

    /// Label with the highest count; ties go to the earliest label.
    pub fn majority(&self) -> Option<&str> {
        let mut best: Option<&(String, usize)> = None;
        for entry in &self.counts {
            if best.is_none_or(|b| entry.1 > b.1) {
                best = Some(entry);
            }
        }
        best.map(|(l, _)| l.as_str())
    }

    /// `label<TAB>count` lines followed by `total<TAB>n`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for (label, n) in &self.counts {
            s.push_str(&format!("{label}\t{n}\n"));
        }
        s.push_str(&format!("total\t{}\n", self.total));
        s
    }
}

/// Count labels at `level`. With a vocab every vocab label is listed in vocab
/// order (zeros included); without one, labels appear in order of first
/// occurrence.
pub fn corpus_stats(
    records: &[TweetRecord],
    level: Level,
    vocab: Option<&LabelVocab>,
) -> Result<CorpusStats, CorpusError> {
    let mut order: Vec<String> = vocab.map(|v| v.labels(level).to_vec()).unwrap_or_default();
    let mut counts: BTreeMap<String, usize> = order.iter().map(|l| (l.clone(), 0)).collect();
    for r in records {
        let label = r.label(level).ok_or_else(|| CorpusError::UnlabeledRecord {
            id: r.id.clone(),
            level,
        })?;
        match counts.get_mut(label) {
            Some(n) => *n += 1,
            None if vocab.is_some() => {
                return Err(CorpusError::UnknownLabel {
                    level,
                    label: label.to_owned(),
                })
            }
            None => {
                order.push(label.to_owned());
                counts.insert(label.to_owned(), 1);
            }
        }
    }
    Ok(CorpusStats {
        level,
        counts: order
            .into_iter()
            .map(|l| {
                let n = counts[&l];
                (l, n)
            })
            .collect(),
        total: records.len(),
    })
}

/// Train records followed by dev records.
pub fn concat_splits(
    train: &[TweetRecord],
    dev: &[TweetRecord],
) -> Result<Vec<TweetRecord>, CorpusError> {
    let ids: HashSet<&str> = train.iter().map(|r| r.id.as_str()).collect();
    if let Some(dup) = dev.iter().find(|r| ids.contains(r.id.as_str())) {
        return Err(CorpusError::DuplicateId(dup.id.clone()));
    }
    Ok(train.iter().chain(dev).cloned().collect())
}

/// Write `id,label` lines, one per prediction, in order.
pub fn write_submission<S: AsRef<str>, L: AsRef<str>>(
    ids: &[S],
    labels: &[L],
    path: &Path,
) -> Result<(), CorpusError> {
    if ids.len() != labels.len() {
        return Err(CorpusError::LengthMismatch {
            ids: ids.len(),
            labels: labels.len(),
        });
    }
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = std::io::BufWriter::new(file);
    for (id, label) in ids.iter().zip(labels) {
        writeln!(w, "{},{}", id.as_ref(), label.as_ref()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Read a submission file back into `(id, label)` pairs.
pub fn read_submission(path: &Path) -> Result<Vec<(String, String)>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (id, label) = line.split_once(',').ok_or_else(|| CorpusError::MalformedRow {
            path: path.to_owned(),
            line: idx + 1,
            expected: 2,
            found: 1,
        })?;
        out.push((id.to_owned(), label.to_owned()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_vocab() -> LabelVocab {
        LabelVocab::parse("Cairo\tEgypt\nAlexandria\tEgypt\nBaghdad\tIraq\n").unwrap()
    }

    fn parse(text: &str, vocab: Option<&LabelVocab>) -> Result<Vec<TweetRecord>, CorpusError> {
        parse_corpus(text, Path::new("t.tsv"), &ColumnSchema::default(), Register::Da, vocab)
    }

    #[test]
    fn loads_labeled_rows() {
        let recs = parse(
            "id\ttweet\tcountry\tprovince\nt1\tنص\tEgypt\tCairo\nt2\tب\tIraq\tBaghdad\nt3\tج\tEgypt\tAlexandria\n",
            Some(&fixture_vocab()),
        )
        .unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(), ["t1", "t2", "t3"]);
        assert_eq!(recs[0].province.as_deref(), Some("Cairo"));
        assert_eq!(recs[2].register, Register::Da);
    }

    #[test]
    fn header_columns_found_by_name() {
        let text = "#2_tweet\t#1_id\nhello\tx1\n";
        let schema = ColumnSchema {
            id: "#1_id".into(),
            text: "#2_tweet".into(),
            ..ColumnSchema::default()
        };
        let recs = parse_corpus(text, Path::new("x"), &schema, Register::Msa, None).unwrap();
        assert_eq!(recs[0].id, "x1");
        assert_eq!(recs[0].text, "hello");
        assert_eq!(recs[0].country, None);
    }

    #[test]
    fn unlabeled_test_split() {
        let recs = parse("id\ttweet\nt1\tنص\n", None).unwrap();
        assert_eq!(recs[0].country, None);
        assert_eq!(recs[0].province, None);
        let recs = parse("t1\tنص\nt2\tكلمة\n", None).unwrap();
        assert_eq!(recs.len(), 2);
    }

    #[test]
    fn errors() {
        let v = fixture_vocab();
        assert!(matches!(
            parse("id\ttweet\tcountry\tprovince\nt1\tx\tEgypt\n", None),
            Err(CorpusError::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse("id\ttweet\tcountry\tprovince\nt1\tx\tMars\t\n", Some(&v)),
            Err(CorpusError::UnknownLabel { .. })
        ));
        assert!(matches!(
            parse("id\ttweet\tcountry\tprovince\nt1\tx\tIraq\tCairo\n", Some(&v)),
            Err(CorpusError::HierarchyViolation { .. })
        ));
        assert!(matches!(
            parse("id\ttweet\nt1\tx\nt1\ty\n", None),
            Err(CorpusError::DuplicateId(id)) if id == "t1"
        ));
    }

    #[test]
    fn vocab_order_and_hierarchy() {
        let v = fixture_vocab();
        assert_eq!(v.countries(), ["Egypt", "Iraq"]);
        assert_eq!(v.provinces(), ["Cairo", "Alexandria", "Baghdad"]);
        assert_eq!(v.country_of("Alexandria"), Some("Egypt"));
        assert!(LabelVocab::parse("Cairo\tEgypt\nCairo\tIraq\n").is_err());
        assert!(LabelVocab::parse("Cairo\n").is_err());
        assert_eq!(LabelVocab::default().countries().len(), 21);
    }

    fn rec(id: &str, country: &str) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            text: String::new(),
            country: Some(country.into()),
            province: None,
            register: Register::Da,
        }
    }

    #[test]
    fn stats_count_by_hand() {
        let recs: Vec<_> = ["A", "A", "B", "A", "B", "A"]
            .iter()
            .enumerate()
            .map(|(i, l)| rec(&i.to_string(), l))
            .collect();
        let s = corpus_stats(&recs, Level::Country, None).unwrap();
        assert_eq!(s.counts, vec![("A".into(), 4), ("B".into(), 2)]);
        assert_eq!(s.total, 6);
        assert_eq!(s.majority(), Some("A"));
    }

    #[test]
    fn stats_empty_lists_zero_counts() {
        let s = corpus_stats(&[], Level::Country, Some(&LabelVocab::default())).unwrap();
        assert_eq!(s.counts.len(), 21);
        assert!(s.counts.iter().all(|(_, n)| *n == 0));
        assert!(matches!(
            corpus_stats(&[rec("1", "A")], Level::Province, None),
            Err(CorpusError::UnlabeledRecord { .. })
        ));
    }

    #[test]
    fn concat() {
        let a = vec![rec("1", "A"), rec("2", "B")];
        let b = vec![rec("3", "A")];
        let all = concat_splits(&a, &b).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all[2].id, "3");
        assert_eq!(concat_splits(&a, &[]).unwrap(), a);
        assert!(matches!(concat_splits(&a, &a), Err(CorpusError::DuplicateId(_))));
    }

    #[test]
    fn submission_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub.csv");
        write_submission(&["t1", "t2"], &["Egypt", "Iraq"], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "t1,Egypt\nt2,Iraq\n");
        write_submission::<&str, &str>(&[], &[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "");
        assert!(matches!(
            write_submission(&["t1"], &["a", "b"], &p),
            Err(CorpusError::LengthMismatch { ids: 1, labels: 2 })
        ));
    }

    #[test]
    fn subtask_codes() {
        assert_eq!("1.2".parse::<Subtask>().unwrap(), Subtask::new(Level::Country, Register::Da));
        assert_eq!(Subtask::new(Level::Province, Register::Msa).code(), "2.1");
        assert!("3.1".parse::<Subtask>().is_err());
    }
}
