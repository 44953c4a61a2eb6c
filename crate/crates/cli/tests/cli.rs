use std::fs;
use std::path::Path;
use std::process::Command;

use effortlab_cli::run;

const FIS: &str = include_str!("../../core/assets/default.fis");
const GRID: &str = include_str!("../../core/assets/default.grid");

fn bin(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_effortlab"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn call(args: &[&str]) -> effortlab_cli::CommandOutcome {
    run(std::iter::once("effortlab").chain(args.iter().copied()))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn replay_table2_prints_recorded_mmres() {
    let (code, stdout, _) = bin(&["replay", "table2", "--format", "text"]);
    assert_eq!(code, 0);
    for v in ["12.96", "13.59", "11.45"] {
        assert!(stdout.contains(v), "missing {v}");
    }
}

#[test]
fn replay_table4_flags_mamdani_aggregate() {
    let out = call(&["replay", "table4"]);
    assert_eq!(out.code, 0, "known discrepancies are not failures");
    assert!(out
        .stdout
        .contains("[irreconcilable] (known) Table 1 Mamdani FIS MMRE%: reported 3.89, recomputed 6.29"));
    assert!(out.stderr.contains("warning:"));
}

#[test]
fn replay_table1_csv_and_json() {
    let csv = call(&["replay", "table1", "--format", "csv"]);
    assert_eq!(csv.code, 0);
    assert!(csv.stdout.starts_with("model,serial,actual,predicted,mre\n"));
    let json = call(&["replay", "table1", "--format", "json"]);
    let bundle = effortlab::render::ReportBundle::from_json(&json.stdout).unwrap();
    assert_eq!(bundle.comparisons[0].winner, "Mamdani FIS");
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["replay", "table1", "--format", "json"][..],
        &["data", "show"][..],
        &["grnn", "eval", "--sigma", "0.2", "--format", "csv"][..],
    ] {
        assert_eq!(bin(args).1, bin(args).1, "{args:?}");
    }
}

#[test]
fn data_validate_rejects_negative_count() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "serial,tcoe,tcoa,tcor,cgpa,rde\n1,5,20,4,7.1,70\n2,-3,20,4,7.1,70\n",
    )
    .unwrap();
    let (code, _, stderr) = bin(&["data", "validate", "--file", p(&bad)]);
    assert_eq!(code, 1);
    assert!(stderr.contains("serial 2"), "{stderr}");
}

#[test]
fn data_export_round_trips_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = call(&["data", "export"]).stdout;
    let file = dir.path().join("d.csv");
    fs::write(&file, &csv).unwrap();
    let out = call(&["data", "validate", "--file", p(&file)]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("ok: 41 records"));
    assert_eq!(call(&["data", "export", "--file", p(&file)]).stdout, csv);
}

#[test]
fn fis_infer_prints_one_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.fis");
    fs::write(&cfg, FIS).unwrap();
    let (code, stdout, _) = bin(&["fis", "infer", "--config", p(&cfg), "--tcoe", "10", "--cgpa", "7.5"]);
    assert_eq!(code, 0);
    let v: f64 = stdout.trim().parse().unwrap();
    assert!((55.0..=80.0).contains(&v));
    assert_eq!(stdout.lines().count(), 1);
}

#[test]
fn fis_infer_missing_input_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.fis");
    fs::write(&cfg, FIS).unwrap();
    let out = call(&["fis", "infer", "--config", p(&cfg), "--tcoe", "10"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("--cgpa"));
}

#[test]
fn fis_bad_config_names_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.fis");
    fs::write(&cfg, "fis \"x\"\ninput A range 0 1\n  mf Low tri 1 0.5 0\n").unwrap();
    let out = call(&["fis", "eval", "--config", p(&cfg)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn fis_tune_writes_loadable_config() {
    let dir = tempfile::tempdir().unwrap();
    let (cfg, grid, best) = (
        dir.path().join("f.fis"),
        dir.path().join("g.grid"),
        dir.path().join("best.fis"),
    );
    fs::write(&cfg, FIS).unwrap();
    fs::write(&grid, GRID).unwrap();
    let out = call(&[
        "fis",
        "tune",
        "--config",
        p(&cfg),
        "--grid",
        p(&grid),
        "--out",
        p(&best),
        "--format",
        "json",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let bundle = effortlab::render::ReportBundle::from_json(&out.stdout).unwrap();
    assert!(bundle.reports[0].mmre_percent <= 6.0);
    let eval = call(&["fis", "eval", "--config", p(&best), "--format", "json"]);
    let again = effortlab::render::ReportBundle::from_json(&eval.stdout).unwrap();
    assert_eq!(again.reports[0].mmre, bundle.reports[0].mmre);
}

#[test]
fn nn_train_eval_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.model");
    let out = call(&[
        "nn",
        "train",
        "--model",
        "ffbp",
        "--seed",
        "7",
        "--epochs",
        "200",
        "--lr",
        "0.05",
        "--hidden",
        "4",
        "--out",
        p(&model),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let first = fs::read_to_string(&model).unwrap();
    call(&[
        "nn",
        "train",
        "--model",
        "ffbp",
        "--seed",
        "7",
        "--epochs",
        "200",
        "--lr",
        "0.05",
        "--hidden",
        "4",
        "--out",
        p(&model),
    ]);
    assert_eq!(first, fs::read_to_string(&model).unwrap(), "same seed, same weights");

    let nn_json = dir.path().join("nn.json");
    let eval = call(&["nn", "eval", "--model-file", p(&model), "--format", "json"]);
    assert_eq!(eval.code, 0);
    fs::write(&nn_json, &eval.stdout).unwrap();

    let grnn_json = dir.path().join("g.json");
    fs::write(
        &grnn_json,
        call(&["grnn", "eval", "--sigma", "0.1", "--format", "json"]).stdout,
    )
    .unwrap();

    let svg = dir.path().join("c.svg");
    let from = format!("{},{}", p(&nn_json), p(&grnn_json));
    let cmp = call(&["report", "compare", "--from", &from, "--svg", p(&svg)]);
    assert_eq!(cmp.code, 0, "{}", cmp.stderr);
    assert!(cmp.stdout.contains("FFBPNN") && cmp.stdout.contains("GRNN"));
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<rect").count(), 2);
}

#[test]
fn nn_train_layer_recurrent_multi_hidden() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("lr.model");
    let out = call(&[
        "nn",
        "train",
        "--model",
        "layerrec",
        "--epochs",
        "50",
        "--hidden",
        "3,2",
        "--features",
        "tcoe,cgpa",
        "--out",
        p(&model),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let eval = call(&["nn", "eval", "--model-file", p(&model), "--subset", "all"]);
    assert!(eval.stdout.contains("n = 41"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(call(&["bogus"]).code, 1);
    assert_eq!(call(&["replay", "table3"]).code, 1);
    assert_eq!(call(&["replay", "table2", "--format", "xml"]).code, 1);
    assert_eq!(call(&["nn", "train", "--model", "rbf", "--out", "x"]).code, 1);
    assert_eq!(call(&["grnn", "eval", "--sigma", "0"]).code, 1);
    assert_eq!(call(&["report", "compare", "--from", "/nonexistent.json"]).code, 1);
    let help = call(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("replay"));
}
