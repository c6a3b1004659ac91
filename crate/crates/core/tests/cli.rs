use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ksvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksvm"))
        .args(args)
        .output()
        .expect("run ksvm")
}

fn ok(args: &[&str]) -> String {
    let out = ksvm(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_blobs_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = p(dir.path(), "a.txt");
    let b = p(dir.path(), "b.txt");
    for out in [&a, &b] {
        ok(&["gen", "blobs", "--means", "0,0", "10,10", "--n", "1000", "--seed", "7", "--out", out]);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 2000);
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let meta = fs::read_to_string(format!("{a}.meta")).unwrap();
    assert!(meta.contains("seed=7") && meta.contains("rng="), "{meta}");
}

#[test]
fn gen_waveform_shape() {
    let dir = tempfile::tempdir().unwrap();
    let f = p(dir.path(), "w.csv");
    ok(&["gen", "waveform", "--n", "5000", "--seed", "1", "--out", &f]);
    let text = fs::read_to_string(&f).unwrap();
    assert_eq!(text.lines().count(), 5000);
    for line in text.lines() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 22);
        assert!(["1", "2", "3"].contains(&fields[0]));
    }
}

#[test]
fn train_predict_eval_on_separable_blobs() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "d.txt");
    let model = p(dir.path(), "m.svm");
    ok(&["gen", "blobs", "--means", "0,0", "10,10", "--n", "1000", "--out", &data]);
    ok(&["train", "--data", &data, "--model", &model, "--c", "1", "--tol", "1e-4"]);
    let preds = ok(&["predict", "--model", &model, "--data", &data]);
    let labels: Vec<String> = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    assert_eq!(preds.lines().collect::<Vec<_>>(), labels);
    let report = ok(&["eval", "--model", &model, "--data", &data, "--c", "1"]);
    assert!(report.contains("error 0.0000%"), "{report}");
    assert!(report.contains("normalized(y=1)"), "{report}");
}

#[test]
fn eval_on_overlapping_test_draw() {
    let dir = tempfile::tempdir().unwrap();
    let train = p(dir.path(), "train.txt");
    let test = p(dir.path(), "test.txt");
    let model = p(dir.path(), "m.svm");
    ok(&["gen", "blobs", "--means", "0,0", "4,0", "--n", "500", "--seed", "3", "--out", &train]);
    ok(&["gen", "blobs", "--means", "0,0", "4,0", "--n", "10000", "--seed", "4", "--out", &test]);
    ok(&["train", "--data", &train, "--model", &model, "--c", "2"]);
    let report = ok(&["eval", "--model", &model, "--data", &test, "--c", "2"]);
    let err: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("error "))
        .unwrap()
        .trim_end_matches('%')
        .parse()
        .unwrap();
    assert!((1.8..=2.9).contains(&err), "{report}");
}

#[test]
fn regression_and_vote_tasks() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "r.csv");
    let mut text = String::new();
    for i in 0..30 {
        let x = i as f64 * 0.2;
        text.push_str(&format!("{},{}\n", x.sin(), x));
    }
    fs::write(&data, text).unwrap();
    let model = p(dir.path(), "r.svm");
    ok(&["train", "--task", "svr", "--data", &data, "--model", &model, "--kernel", "gauss:c=1", "--c", "100", "--epsilon", "0.05", "--verbose"]);
    assert!(fs::read_to_string(&model).unwrap().starts_with("SVMODEL 1 svr"));
    let report = ok(&["eval", "--model", &model, "--data", &data]);
    assert!(report.contains("epsilon_risk"), "{report}");

    let wave = p(dir.path(), "w.txt");
    let vote = p(dir.path(), "w.svm");
    ok(&["gen", "waveform", "--n", "300", "--out", &wave]);
    ok(&["train", "--task", "ovo", "--data", &wave, "--model", &vote, "--kernel", "gauss:c=200"]);
    assert!(fs::read_to_string(&vote).unwrap().starts_with("SVMODEL 1 ovo"));
    let preds = ok(&["predict", "--model", &vote, "--data", &wave]);
    assert_eq!(preds.lines().count(), 300);
}

#[test]
fn dimension_mismatch_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let d2 = p(dir.path(), "d2.csv");
    let d3 = p(dir.path(), "d3.csv");
    let model = p(dir.path(), "m.svm");
    fs::write(&d2, "1,1,1\n-1,-1,-1\n").unwrap();
    fs::write(&d3, "1,1,1,1\n").unwrap();
    ok(&["train", "--data", &d2, "--model", &model]);
    let out = ksvm(&["predict", "--model", &model, "--data", &d3]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let out = ksvm(&["train", "--data", "/nonexistent", "--model", "/tmp/x", "--kernel", "rbf"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ksvm(&["experiment", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ksvm(&["train", "--data", "/nonexistent/file.txt", "--model", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_tolerance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = p(dir.path(), "d.txt");
    let model = p(dir.path(), "m.svm");
    ok(&["gen", "blobs", "--means", "0,0", "1,1", "--n", "50", "--out", &data]);
    let out = ksvm(&["train", "--data", &data, "--model", &model, "--tol", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_reports_and_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = p(dir.path(), "t.tsv");
    let out = ok(&["experiment", "blobs-separable", "--reps", "3", "--tsv", &tsv]);
    assert!(out.contains("[PASS] max training error"), "{out}");
    assert_eq!(fs::read_to_string(&tsv).unwrap().lines().count(), 4);
    // A sweep that cannot be strictly increasing fails its band.
    let out = ksvm(&["experiment", "c-sweep", "--reps", "1", "--cs", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
}
