use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const EXAMPLE: &str = "pésiiiimo auto :( @autoX fallan frenos y sistema de entretenimiento; no lo compren";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_textsweep"))
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn small_corpus(dir: &Path, docs: usize) -> PathBuf {
    let path = dir.join("corpus.tsv");
    let o = run(&["gen", "--docs", &docs.to_string(), "--seed", "3", "--out", path.to_str().unwrap()], "");
    assert!(o.status.success());
    path
}

#[test]
fn transform_reproduces_worked_examples() {
    let o = run(&["transform", "--flags", "stem,del-d1,del-diac,usr,neg"], &format!("{EXAMPLE}\n"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "pesim aut :( _user fal fren y sistem de entreten ; lo no_compr\n");
    let o = run(&["transform", "--flags", "del-diac,emo,usr,lc,neg"], &format!("{EXAMPLE}\n"));
    assert_eq!(
        stdout(&o),
        "pesiiiimo auto _negativo _user fallan frenos y sistema de entretenimiento ; lo no_compren\n"
    );
}

#[test]
fn transform_keeps_line_count() {
    let o = run(&["transform", "--flags", "lc"], "A\n\nB C\n");
    assert_eq!(stdout(&o), "a\n\nb c\n");
}

#[test]
fn empty_stdin_gives_empty_stdout() {
    let o = run(&["transform", "--flags", "lc"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_flag_is_usage_error() {
    let o = run(&["transform", "--flags", "bogus"], "");
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
    assert_eq!(run(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(run(&["sweep", "--no-such-option"], "").status.code(), Some(1));
}

#[test]
fn bad_lexicon_is_data_error() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("emoticons.tsv"), "no tab here\n").unwrap();
    let o = run(&["transform", "--flags", "emo", "--lexicons", dir.path().to_str().unwrap()], "x\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn bad_corpus_is_data_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.tsv");
    fs::write(&path, "d1\tpositive\tok\nd2\tsomething\ttext\n").unwrap();
    let o = run(&["eval", "--corpus", path.to_str().unwrap(), "--config", "tok=w1"], "");
    assert_eq!(o.status.code(), Some(2));
    let missing = dir.path().join("missing.tsv");
    let o = run(&["heaps", "--corpus", missing.to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_on_every_subcommand() {
    let o = run(&["--help"], "");
    assert_eq!(o.status.code(), Some(0));
    for (sub, flags) in [
        ("transform", &["--flags", "--lexicons"][..]),
        ("tokenize", &["--tok", "--flags", "--lexicons"]),
        ("train", &["--corpus", "--config", "--model-out", "--epochs", "--seed"]),
        ("eval", &["--corpus", "--split", "--gold", "--train-fraction", "--folds", "--config"]),
        ("sweep", &["--space", "--preset", "--configs", "--workers", "--out", "--resume", "--timings"]),
        ("topk", &["--results", "--k", "--split"]),
        ("expand", &["--results", "--top", "--split"]),
        ("heaps", &["--corpus", "--interval", "--points"]),
        ("gen", &["--docs", "--seed", "--vocab", "--zipf", "--keyword-noise", "--out"]),
    ] {
        let o = run(&[sub, "--help"], "");
        assert_eq!(o.status.code(), Some(0), "{sub}");
        let text = stdout(&o);
        for flag in flags {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
}

#[test]
fn tokenize_prints_sorted_counts() {
    let o = run(&["tokenize", "--tok", "w1"], "b a b\n");
    assert_eq!(stdout(&o), "{\"w1:a\":1,\"w1:b\":2}\n");
    let o = run(&["tokenize", "--tok", "w1", "--flags", "lc"], "B b\n");
    assert_eq!(stdout(&o), "{\"w1:b\":2}\n");
}

#[test]
fn gen_is_reproducible() {
    let a = run(&["gen", "--docs", "12", "--seed", "9"], "");
    let b = run(&["gen", "--docs", "12", "--seed", "9"], "");
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 12);
    let c = run(&["gen", "--docs", "12", "--seed", "10"], "");
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(run(&["gen", "--keyword-noise", "2"], "").status.code(), Some(2));
}

#[test]
fn train_writes_model() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(dir.path(), 40);
    let model = dir.path().join("model.json");
    let o = run(
        &["train", "--corpus", corpus.to_str().unwrap(), "--config", "tok=w1", "--model-out", model.to_str().unwrap()],
        "",
    );
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(summary["documents"], 40);
    assert_eq!(summary["train_accuracy"], 1.0);
    assert!(model.exists());
}

#[test]
fn eval_gold_split() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(dir.path(), 80);
    let c = corpus.to_str().unwrap();
    let o = run(&["eval", "--corpus", c, "--config", "tok=w1", "--split", "gold", "--train-fraction", "0.5"], "");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total: u64 = result["confusion"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter().map(|v| v.as_u64().unwrap()))
        .sum();
    assert_eq!(total, 40);
}

#[test]
fn sweep_resume_topk_and_expand() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(dir.path(), 40);
    let out = dir.path().join("fast.jsonl");
    let (c, r) = (corpus.to_str().unwrap(), out.to_str().unwrap());

    let o = run(&["sweep", "--corpus", c, "--preset", "fast", "--out", r], "");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("127 evaluated, 0 skipped"), "{}", stdout(&o));
    let first = fs::read(&out).unwrap();
    assert_eq!(first.iter().filter(|b| **b == b'\n').count(), 127);

    let o = run(&["sweep", "--corpus", c, "--preset", "fast", "--out", r, "--resume"], "");
    assert!(stdout(&o).starts_with("0 evaluated, 127 skipped"), "{}", stdout(&o));
    assert_eq!(fs::read(&out).unwrap(), first);

    let o = run(&["topk", "--results", r], "");
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let k: usize = row[0].parse().unwrap();
        let truncated = *row.last().unwrap();
        if k > 127 {
            assert_eq!(truncated, "127");
        } else {
            assert_eq!(truncated, "-");
        }
    }
    let acc: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(acc.windows(2).all(|w| w[0] >= w[1]));

    let o = run(&["topk", "--results", r, "--k", "1"], "");
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert!(row[3..row.len() - 1].iter().all(|p| *p == "0.0000" || *p == "1.0000"));

    assert_eq!(run(&["topk", "--results", r, "--k", "0"], "").status.code(), Some(2));
    assert_eq!(run(&["topk", "--results", r, "--split", "gold"], "").status.code(), Some(2));

    let o = run(&["expand", "--results", r, "--top", "4"], "");
    assert_eq!(o.status.code(), Some(0));
    // every fast record shares one flag assignment
    assert_eq!(stdout(&o).lines().count(), 127);
}

#[test]
fn empty_results_file_is_data_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("empty.jsonl");
    fs::write(&path, "").unwrap();
    assert_eq!(run(&["topk", "--results", path.to_str().unwrap()], "").status.code(), Some(2));
}

#[test]
fn heaps_reports_fit() {
    let dir = TempDir::new().unwrap();
    let corpus = small_corpus(dir.path(), 200);
    let points = dir.path().join("points.tsv");
    let o = run(
        &["heaps", "--corpus", corpus.to_str().unwrap(), "--interval", "50", "--points", points.to_str().unwrap()],
        "",
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fit: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let alpha = fit["alpha"].as_f64().unwrap();
    assert!(alpha > 0.0 && alpha < 1.0, "{alpha}");
    let lines = fs::read_to_string(&points).unwrap();
    assert_eq!(lines.lines().next(), Some("n\tV"));
    assert_eq!(lines.lines().count() as u64 - 1, fit["points"].as_u64().unwrap());
}
