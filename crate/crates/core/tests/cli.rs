use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nadi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nadi")).args(args).output().expect("spawn nadi")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn unknown_subcommand_exits_2() {
    let o = nadi(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn missing_input_exits_1_and_names_path() {
    let o = nadi(&["stats", "--in", "/definitely/missing.tsv"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("/definitely/missing.tsv"));
}

#[test]
fn bad_max_repeat_is_a_usage_error() {
    let o = nadi(&["normalize", "--in", "a", "--out", "b", "--max-repeat", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn normalize_rewrites_text_column_only() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let output = dir.path().join("out.tsv");
    std::fs::write(&input, "id\ttweet\tcountry\n1\t@user هههههه http://x.co <br>\tEgypt\n2\tوالكتاب\tIraq\n").unwrap();
    let o = nadi(&["normalize", "--in", s(&input), "--out", s(&output), "--segment"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        std::fs::read_to_string(&output).unwrap(),
        "id\ttweet\tcountry\n1\t[مستخدم] هه [رابط]\tEgypt\n2\tوال+ كتاب\tIraq\n"
    );
}

#[test]
fn normalize_uses_presegmented_table() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let table = dir.path().join("seg.tsv");
    let output = dir.path().join("out.tsv");
    std::fs::write(&input, "1\tوالكتاب بيت\n").unwrap();
    std::fs::write(&table, "والكتاب\tو+ال+كتاب\n").unwrap();
    let o = nadi(&[
        "normalize", "--in", s(&input), "--out", s(&output), "--segment", "--presegmented", s(&table),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&output).unwrap(), "1\tو+ال+كتاب ب+ يت\n");
}

#[test]
fn benchmark_smoke_on_bundled_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let grid = fixtures().join("grid.toml");
    let o = nadi(&["benchmark", "--config", s(&grid), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("weighted_f1"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("* ")));
    for f in ["grid.tsv", "submission.csv", "model.bin", "idf.bin", "pipeline.toml", "report.tsv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn train_predict_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let model = dir.path().join("model");
    let sub = dir.path().join("sub.csv");
    let vocab = f.join("vocab.tsv");
    let o = nadi(&[
        "train", "--train", s(&f.join("train.tsv")), "--dev", s(&f.join("dev.tsv")), "--vocab", s(&vocab),
        "--out", s(&model), "--config", s(&f.join("grid.toml")), "--experiment", "char1-3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = nadi(&["predict", "--model", s(&model), "--in", s(&f.join("test.tsv")), "--out", s(&sub)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&sub).unwrap().lines().count(), 200);
    let o = nadi(&["evaluate", "--gold", s(&f.join("test.tsv")), "--pred", s(&sub), "--vocab", s(&vocab)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("M-F1 "), "{out}");
    assert!(out.contains("macro_f1\t"));
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let f = fixtures();
    let dir = tempfile::tempdir().unwrap();
    let o = nadi(&[
        "train", "--train", s(&f.join("train.tsv")), "--vocab", s(&f.join("vocab.tsv")),
        "--out", s(dir.path()), "--config", s(&f.join("grid.toml")), "--experiment", "nope",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope"));
}

#[test]
fn stats_prints_counts_and_total() {
    let f = fixtures();
    let o = nadi(&["stats", "--in", s(&f.join("train.tsv")), "--vocab", s(&f.join("vocab.tsv"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        "Egypt\t200\nIraq\t200\nMorocco\t200\nOman\t200\ntotal\t800\n"
    );
}
