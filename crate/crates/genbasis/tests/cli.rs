use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn genbasis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genbasis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn verify_small_sweep_exits_zero_with_csv_table() {
    let out = genbasis(&["verify", "--seeds", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("property,checked,failures"));
    assert!(text.contains("P1,5,0"));
    assert!(text.contains("B1_13,5,0"));
}

#[test]
fn verify_mutant_exits_one_with_counterexample() {
    let out = genbasis(&["verify", "--seeds", "5", "--mutant", "invert-feasible"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterexample"));
}

#[test]
fn verify_unknown_mutant_is_a_usage_error() {
    let out = genbasis(&["verify", "--seeds", "1", "--mutant", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = genbasis(&["verify", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_demo_walks_the_fixture() {
    let out = genbasis(&["exact-demo", &fixture("two_feature_universe.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("generalization set gen(Z) = {0}"));
    assert!(text.contains("gen({0, 1}) = {0, 1}"));
}

#[test]
fn exact_demo_without_oracle_in_space_surfaces_the_precondition() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("no_oracle.txt");
    fs::write(
        &path,
        "universe x=2 y=2\noracle 0 1\nhyp 0 0\nhyp 1 0\nmask 0\n",
    )
    .unwrap();
    let out = genbasis(&["exact-demo", &path.display().to_string()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn mnist_pool_without_paths_is_a_usage_error() {
    let out = genbasis(&["select-bases", "--pool", "mnist"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--images"));
}

#[test]
fn select_bases_writes_all_declared_outputs() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = genbasis(&[
        "select-bases",
        "--pool",
        "gauss2",
        "--samples",
        "120",
        "--model",
        "mlp:16",
        "--n",
        "3",
        "--batch-add",
        "4",
        "--initial-per-class",
        "5",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    for name in ["basis.manifest", "rounds.csv", "progress.svg"] {
        let path = out_dir.join(name);
        assert!(path.exists(), "missing {name}");
        assert!(stdout(&out).contains(name), "stdout does not list {name}");
    }
    let csv = fs::read_to_string(out_dir.join("rounds.csv")).unwrap();
    assert!(csv.starts_with(
        "round,basis_size,unanimous_correct,unanimous_wrong,disagreement,seconds"
    ));
}

#[test]
fn retrain_eval_prefix_baseline_runs() {
    let dir = tempdir().unwrap();
    let out_dir = dir.path().join("eval");
    let out = genbasis(&[
        "retrain-eval",
        "--pool",
        "gauss2",
        "--samples",
        "120",
        "--model",
        "mlp:16",
        "--prefix",
        "30",
        "--trials",
        "2",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("+/-"));
    let trials = fs::read_to_string(out_dir.join("retrain_trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 3); // header + 2 trials
    let ckpt = fs::read(out_dir.join("model.sgnn")).unwrap();
    assert!(ckpt.starts_with(b"SGNN1\n"));
}

#[test]
fn retrain_eval_needs_exactly_one_basis_source() {
    let out = genbasis(&["retrain-eval", "--pool", "gauss2", "--samples", "60"]);
    assert_eq!(out.status.code(), Some(2));
}
