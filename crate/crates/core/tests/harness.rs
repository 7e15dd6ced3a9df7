use std::collections::HashSet;

use nadi_core::corpus::{
    concat_splits, corpus_stats, read_submission, Level, Register, Subtask, TweetRecord,
};
use nadi_core::evaluation::report;
use nadi_core::harness::{
    finalize, run_grid, ExperimentConfig, FitStage, HarnessError, NoTrace, Pipeline,
    RecordingTracer, SelectionMetric,
};
use nadi_core::synthetic::{dialect_vocab, four_dialects, SyntheticCorpus};
use nadi_core::Error;

fn corpus() -> SyntheticCorpus {
    four_dialects(7, [40, 10, 10], Register::Da)
}

fn country_da(name: &str, epochs: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name, Subtask::new(Level::Country, Register::Da));
    c.features.dim = 1 << 14;
    c.hp.epochs = epochs;
    c
}

fn ids(records: &[TweetRecord]) -> Vec<String> {
    records.iter().map(|r| r.id.clone()).collect()
}

#[test]
fn grid_fits_see_only_train_records() {
    let c = corpus();
    let configs = [country_da("trained", 5), country_da("control", 0)];
    let mut tracer = RecordingTracer::default();
    run_grid(&c.train, &c.dev, &configs, &c.vocab, SelectionMetric::WeightedF1, &mut tracer).unwrap();

    let dev: HashSet<String> = ids(&c.dev).into_iter().collect();
    assert_eq!(tracer.events.len(), 4);
    for (i, (stage, name, seen)) in tracer.events.iter().enumerate() {
        assert_eq!(*stage, if i % 2 == 0 { FitStage::Idf } else { FitStage::Train });
        assert_eq!(name, &configs[i / 2].name);
        assert_eq!(seen, &ids(&c.train));
        assert!(seen.iter().all(|id| !dev.contains(id)));
    }
}

#[test]
fn grid_rows_equal_train_only_refit_scored_on_dev() {
    let c = corpus();
    let configs = [country_da("a", 3)];
    let grid = run_grid(&c.train, &c.dev, &configs, &c.vocab, SelectionMetric::MacroF1, &mut NoTrace).unwrap();

    let labels = c.vocab.labels(Level::Country);
    let p = Pipeline::fit(&c.train, &configs[0], labels, &mut NoTrace).unwrap();
    let pred = p.predict_all(&c.dev).unwrap();
    let gold: Vec<&str> = c.dev.iter().map(|r| r.country.as_deref().unwrap()).collect();
    let rep = report(&gold, &pred, labels).unwrap();
    let row = &grid.rows[0];
    assert_eq!((row.weighted_f1, row.accuracy, row.macro_f1), (rep.weighted_f1, rep.accuracy, rep.macro_f1));
}

#[test]
fn trained_config_beats_epochs_zero_control() {
    let c = corpus();
    let configs = [country_da("control", 0), country_da("trained", 5)];
    let grid = run_grid(&c.train, &c.dev, &configs, &c.vocab, SelectionMetric::WeightedF1, &mut NoTrace).unwrap();
    assert_eq!(grid.selected, "trained");
    assert!(grid.rows[1].weighted_f1 > grid.rows[0].weighted_f1);
    assert!(grid.table().lines().any(|l| l.starts_with('*') && l.contains("trained")));
}

#[test]
fn finalize_trains_on_train_plus_dev() {
    let c = corpus();
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("submission.csv");
    let mut tracer = RecordingTracer::default();
    let out = finalize(&c.train, &c.dev, &c.test, &country_da("x", 3), &c.vocab, &sub, &mut tracer).unwrap();

    assert_eq!(out.training_records, c.train.len() + c.dev.len());
    let combined = ids(&concat_splits(&c.train, &c.dev).unwrap());
    assert_eq!(tracer.events.len(), 2);
    for (_, _, seen) in &tracer.events {
        assert_eq!(seen, &combined);
    }
    let test_ids: HashSet<String> = ids(&c.test).into_iter().collect();
    assert!(tracer.events.iter().all(|(_, _, s)| s.iter().all(|id| !test_ids.contains(id))));

    let written = read_submission(&sub).unwrap();
    assert_eq!(written.len(), c.test.len());
    for ((id, label), (r, p)) in written.iter().zip(c.test.iter().zip(&out.predictions)) {
        assert_eq!((id, label), (&r.id, p));
    }
    assert!(out.report.is_some());
}

#[test]
fn unlabeled_test_split_has_no_report() {
    let c = corpus();
    let test: Vec<TweetRecord> = c
        .test
        .iter()
        .map(|r| TweetRecord { country: None, province: None, ..r.clone() })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("s.csv");
    let out = finalize(&c.train, &c.dev, &test, &country_da("x", 2), &c.vocab, &sub, &mut NoTrace).unwrap();
    assert!(out.report.is_none());
    assert_eq!(read_submission(&sub).unwrap().len(), test.len());
}

#[test]
fn empty_after_normalization_falls_back_to_majority() {
    let c = corpus();
    // make Oman the most frequent class in train+dev
    let mut train = c.train.clone();
    train.retain(|r| r.country.as_deref() != Some("Egypt") || r.id.ends_with('0'));
    let extra: Vec<TweetRecord> = c
        .test
        .iter()
        .filter(|r| r.country.as_deref() == Some("Oman"))
        .map(|r| TweetRecord { id: format!("x{}", r.id), ..r.clone() })
        .collect();
    train.extend(extra);

    let combined = concat_splits(&train, &c.dev).unwrap();
    let stats = corpus_stats(&combined, Level::Country, Some(&c.vocab)).unwrap();
    let majority = stats.majority().unwrap().to_owned();
    assert_eq!(majority, "Oman");

    let test = vec![
        TweetRecord { id: "e1".into(), text: "😂😂 ❤️".into(), country: None, province: None, register: Register::Da },
        TweetRecord { id: "e2".into(), text: "".into(), country: None, province: None, register: Register::Da },
    ];
    let dir = tempfile::tempdir().unwrap();
    let out = finalize(&train, &c.dev, &test, &country_da("x", 3), &c.vocab, &dir.path().join("s.csv"), &mut NoTrace)
        .unwrap();
    assert_eq!(out.pipeline.fallback_label(), majority);
    assert_eq!(out.predictions, vec![majority.clone(), majority]);
}

fn assert_rejected_before_training(result: nadi_core::Result<impl std::fmt::Debug>, tracer: &RecordingTracer) -> Error {
    assert!(tracer.events.is_empty(), "training started: {:?}", tracer.events.len());
    result.expect_err("config should be rejected")
}

#[test]
fn province_config_without_province_vocab_is_rejected() {
    let c = corpus();
    let mut bad = country_da("prov", 1);
    bad.subtask = Subtask::new(Level::Province, Register::Da);
    let countries = nadi_core::corpus::LabelVocab::countries_only(
        c.vocab.countries().iter().cloned(),
    );
    let mut tracer = RecordingTracer::default();
    let configs = [country_da("ok", 1), bad];
    let res = run_grid(&c.train, &c.dev, &configs, &countries, SelectionMetric::WeightedF1, &mut tracer);
    let err = assert_rejected_before_training(res, &tracer);
    assert!(matches!(err, Error::Harness(HarnessError::MissingProvinceVocab(ref n)) if n == "prov"), "{err}");
}

#[test]
fn province_config_on_country_only_records_is_rejected() {
    let c = corpus();
    let strip = |rs: &[TweetRecord]| -> Vec<TweetRecord> {
        rs.iter().map(|r| TweetRecord { province: None, ..r.clone() }).collect()
    };
    let mut cfg = country_da("prov", 1);
    cfg.subtask = Subtask::new(Level::Province, Register::Da);
    let mut tracer = RecordingTracer::default();
    let res = run_grid(&strip(&c.train), &strip(&c.dev), &[cfg], &dialect_vocab(), SelectionMetric::WeightedF1, &mut tracer);
    let err = assert_rejected_before_training(res, &tracer);
    assert!(matches!(err, Error::Harness(HarnessError::SubtaskMismatch { .. })), "{err}");
}

#[test]
fn register_mismatch_is_rejected() {
    let c = corpus();
    let mut cfg = country_da("msa", 1);
    cfg.subtask = Subtask::new(Level::Country, Register::Msa);
    let mut tracer = RecordingTracer::default();
    let res = run_grid(&c.train, &c.dev, &[cfg], &c.vocab, SelectionMetric::WeightedF1, &mut tracer);
    let err = assert_rejected_before_training(res, &tracer);
    assert!(matches!(err, Error::Harness(HarnessError::RegisterMismatch { .. })), "{err}");
}

#[test]
fn duplicate_names_and_empty_grid_are_rejected() {
    let c = corpus();
    let dup = [country_da("a", 1), country_da("a", 1)];
    assert!(run_grid(&c.train, &c.dev, &dup, &c.vocab, SelectionMetric::WeightedF1, &mut NoTrace).is_err());
    assert!(run_grid(&c.train, &c.dev, &[], &c.vocab, SelectionMetric::WeightedF1, &mut NoTrace).is_err());
}

#[test]
fn province_level_pipeline_runs() {
    let c = corpus();
    let mut cfg = country_da("prov", 3);
    cfg.subtask = Subtask::new(Level::Province, Register::Da);
    let grid = run_grid(&c.train, &c.dev, &[cfg], &c.vocab, SelectionMetric::MacroF1, &mut NoTrace).unwrap();
    assert_eq!(grid.rows.len(), 1);
    assert!((0.0..=1.0).contains(&grid.rows[0].macro_f1));
}

#[test]
fn saved_pipeline_predicts_identically() {
    let c = corpus();
    let mut cfg = country_da("seg", 3);
    cfg.norm.segment = true;
    cfg.segmenter = cfg.segmenter.with_overrides_tsv("كتاب\tك+ تاب\n").unwrap();
    let p = Pipeline::fit(&c.train, &cfg, c.vocab.labels(Level::Country), &mut NoTrace).unwrap();
    let dir = tempfile::tempdir().unwrap();
    p.save(dir.path()).unwrap();
    let back = Pipeline::load(dir.path()).unwrap();
    assert_eq!(back.predict_all(&c.test).unwrap(), p.predict_all(&c.test).unwrap());
    assert_eq!(back.prepare("والكتاب كتاب"), p.prepare("والكتاب كتاب"));
    assert_eq!(back.model(), p.model());
    assert_eq!(back.idf(), p.idf());
}

#[test]
fn pipeline_load_rejects_mismatched_files() {
    let c = corpus();
    let cfg = country_da("a", 1);
    let p = Pipeline::fit(&c.train, &cfg, c.vocab.labels(Level::Country), &mut NoTrace).unwrap();
    let dir = tempfile::tempdir().unwrap();
    p.save(dir.path()).unwrap();
    let mut other = country_da("b", 1);
    other.features.n_max = 4;
    let q = Pipeline::fit(&c.train, &other, c.vocab.labels(Level::Country), &mut NoTrace).unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    q.save(dir2.path()).unwrap();
    std::fs::copy(dir2.path().join("model.bin"), dir.path().join("model.bin")).unwrap();
    assert!(Pipeline::load(dir.path()).is_err());
}

mod selection {
    use nadi_core::harness::{select, GridRow, SelectionMetric};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn picks_earliest_maximum(scores in proptest::collection::vec((0u8..5, 0u8..5, 0u8..5), 1..12), m in 0usize..3) {
            let metric = [SelectionMetric::WeightedF1, SelectionMetric::MacroF1, SelectionMetric::Accuracy][m];
            let rows: Vec<GridRow> = scores
                .iter()
                .enumerate()
                .map(|(i, &(w, a, f))| GridRow {
                    name: format!("r{i}"),
                    weighted_f1: w as f64 / 4.0,
                    accuracy: a as f64 / 4.0,
                    macro_f1: f as f64 / 4.0,
                })
                .collect();
            let best = select(&rows, metric);
            let values: Vec<f64> = rows.iter().map(|r| r.metric(metric)).collect();
            let max = values.iter().copied().fold(f64::MIN, f64::max);
            prop_assert_eq!(values[best], max);
            prop_assert!(values[..best].iter().all(|&v| v < max));
        }
    }
}
