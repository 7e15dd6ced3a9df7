use std::path::Path;

use nadi_core::corpus::{
    corpus_stats, load_corpus, parse_corpus, read_submission, write_corpus, write_submission,
    ColumnSchema, CorpusError, LabelVocab, Level, Register, TweetRecord,
};
use proptest::prelude::*;

fn vocab() -> LabelVocab {
    LabelVocab::parse("Cairo\tEgypt\nAlexandria\tEgypt\nBaghdad\tIraq\n").unwrap()
}

fn parse(text: &str, vocab: Option<&LabelVocab>) -> Result<Vec<TweetRecord>, CorpusError> {
    parse_corpus(text, Path::new("mem.tsv"), &ColumnSchema::default(), Register::Da, vocab)
}

#[test]
fn hierarchy_is_enforced() {
    let v = vocab();
    let ok = parse("id\ttweet\tcountry\tprovince\n1\tنص\tEgypt\tCairo\n", Some(&v)).unwrap();
    assert_eq!(ok[0].province.as_deref(), Some("Cairo"));
    let bad = parse("id\ttweet\tcountry\tprovince\n1\tنص\tIraq\tCairo\n", Some(&v));
    assert!(matches!(bad, Err(CorpusError::HierarchyViolation { .. })));
    let unknown = parse("id\ttweet\tcountry\n1\tنص\tAtlantis\n", Some(&v));
    assert!(matches!(unknown, Err(CorpusError::UnknownLabel { .. })));
}

#[test]
fn header_columns_may_be_reordered_and_extra() {
    let recs = parse("tweet\tprovince\tx\tid\tcountry\nنص\tBaghdad\t?\t7\tIraq\n", Some(&vocab())).unwrap();
    assert_eq!(recs[0].id, "7");
    assert_eq!(recs[0].text, "نص");
    assert_eq!(recs[0].label(Level::Province), Some("Baghdad"));
}

#[test]
fn headerless_files_are_positional() {
    let recs = parse("1\tنص اول\n2\tنص ثان\n", None).unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1].text, "نص ثان");
    assert!(recs[0].country.is_none());
}

#[test]
fn malformed_rows_name_the_line() {
    let err = parse("id\ttweet\n1\ta\n2\n", None).unwrap_err();
    assert!(err.to_string().contains("mem.tsv:3"), "{err}");
    assert!(matches!(parse("id\ttweet\n1\ta\n1\tb\n", None), Err(CorpusError::DuplicateId(_))));
    assert!(matches!(parse("id\ttweet\n \ta\n", None), Err(CorpusError::EmptyId { .. })));
}

#[test]
fn missing_file_error_names_path() {
    let err = load_corpus(Path::new("/no/such/file.tsv"), &ColumnSchema::default(), Register::Da, None)
        .unwrap_err();
    assert!(err.to_string().contains("/no/such/file.tsv"));
}

#[test]
fn stats_follow_vocab_order_with_zeros() {
    let v = vocab();
    let recs = parse(
        "id\ttweet\tcountry\tprovince\n1\ta\tIraq\tBaghdad\n2\tb\tIraq\tBaghdad\n3\tc\tEgypt\tCairo\n",
        Some(&v),
    )
    .unwrap();
    let s = corpus_stats(&recs, Level::Country, Some(&v)).unwrap();
    assert_eq!(s.to_tsv(), "Egypt\t1\nIraq\t2\ntotal\t3\n");
    assert_eq!(s.majority(), Some("Iraq"));
    let p = corpus_stats(&recs, Level::Province, Some(&v)).unwrap();
    assert_eq!(p.count("Alexandria"), Some(0));
    assert_eq!(p.count("Baghdad"), Some(2));
}

#[test]
fn submission_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.csv");
    write_submission(&["a", "b"], &["Egypt", "Iraq"], &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "a,Egypt\nb,Iraq\n");
    assert_eq!(read_submission(&p).unwrap(), vec![("a".into(), "Egypt".into()), ("b".into(), "Iraq".into())]);
    assert!(write_submission(&["a"], &["x", "y"], &p).is_err());
}

fn record() -> impl Strategy<Value = (String, Option<usize>)> {
    ("[^\t\n\r]{0,20}", proptest::option::of(0usize..3))
}

proptest! {
    #[test]
    fn corpus_round_trips(rows in proptest::collection::vec(record(), 0..20)) {
        let v = vocab();
        let provinces = v.provinces().to_vec();
        let records: Vec<TweetRecord> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (text, label))| {
                let province = label.map(|k| provinces[k].clone());
                TweetRecord {
                    id: format!("t{i}"),
                    text,
                    country: province.as_deref().and_then(|p| v.country_of(p)).map(str::to_owned),
                    province,
                    register: Register::Msa,
                }
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.tsv");
        write_corpus(&records, &ColumnSchema::default(), &path).unwrap();
        let back = load_corpus(&path, &ColumnSchema::default(), Register::Msa, Some(&v)).unwrap();
        prop_assert_eq!(back, records);
    }
}
