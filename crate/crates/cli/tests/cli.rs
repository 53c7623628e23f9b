use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use tempfile::TempDir;

use srq_core::io::{parse_array, write_array_binary, write_array_text};
use srq_core::oracle::oracle_answer;
use srq_core::query::{QueryKind, QuerySpec};

fn srq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srq")).args(args).output().expect("run srq")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn build(dir: &TempDir, a: &[i64], variant: &str) -> (String, Value) {
    let arr = p(dir, "a.txt");
    let enc = p(dir, &format!("{variant}.srq"));
    fs::write(&arr, write_array_text(a)).unwrap();
    let o = srq(&["build", &arr, "-o", &enc, "--variant", variant]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (enc, serde_json::from_str(stdout(&o).trim()).unwrap())
}

fn run_script(dir: &TempDir, enc: &str, script: &str) -> Output {
    let path = p(dir, "q.txt");
    fs::write(&path, script).unwrap();
    srq(&["query", enc, &path])
}

#[test]
fn build_reports_space() {
    let dir = TempDir::new().unwrap();
    let a: Vec<i64> = (0..5000).map(|i| (i * 7919) % 5003).collect();
    let (enc, r) = build(&dir, &a, "b");
    let report = &r["report"];
    assert_eq!(r["command"], "build");
    assert_eq!(report["n"], 5000);
    assert_eq!(report["k"], 0);
    assert!(report["payload_bits"].as_u64().unwrap() <= 3 * 5000);
    assert_eq!(report["pass"], true);
    assert_eq!(fs::metadata(&enc).unwrap().len(), r["file_bytes"].as_u64().unwrap());
}

#[test]
fn all_equal_array_has_n_minus_one_duplicates() {
    let dir = TempDir::new().unwrap();
    let (_, r) = build(&dir, &[4; 300], "d");
    assert_eq!(r["report"]["k"], 299);
    let t = r["report"]["components"].as_array().unwrap().iter().find(|c| c["name"] == "T'").unwrap();
    assert!(t["payload_bits"].as_u64().unwrap() <= 4);
}

#[test]
fn rejects_short_and_malformed_arrays() {
    let dir = TempDir::new().unwrap();
    let one = p(&dir, "one.txt");
    fs::write(&one, "7\n").unwrap();
    let o = srq(&["build", &one, "-o", &p(&dir, "x.srq")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2"));
    fs::write(&one, "1 2\nthree\n").unwrap();
    let o = srq(&["build", &one, "-o", &p(&dir, "x.srq")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = srq(&["build", &p(&dir, "missing.txt"), "-o", &p(&dir, "x.srq")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn random_script_matches_oracle() {
    let dir = TempDir::new().unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    let n = 2000;
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..40)).collect();
    let (enc, _) = build(&dir, &a, "d");
    let mut script = String::from("# random queries\n");
    let mut want = Vec::new();
    for _ in 0..10_000 {
        let kind = QueryKind::ALL[rng.gen_range(0..12)];
        let i = rng.gen_range(1..=n);
        let j = rng.gen_range(i..=n);
        let q = if kind.is_kth() {
            QuerySpec::kth(kind, i, j, rng.gen_range(1..6))
        } else if kind.is_range() {
            QuerySpec::range(kind, i, j)
        } else {
            QuerySpec::point(kind, i)
        };
        script.push_str(&format!("{q}\n"));
        want.push(oracle_answer(&a, &q).unwrap().map_or("NONE".to_string(), |x| x.to_string()));
    }
    let o = run_script(&dir, &enc, &script);
    assert!(o.status.success());
    let got: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(got, want);
}

#[test]
fn sentinels_and_missing_occurrences() {
    let dir = TempDir::new().unwrap();
    let (enc, _) = build(&dir, &[2, 1, 1, 2], "c");
    let o = run_script(&dir, &enc, "PSV 1\nNLV 4\nrkminq 1 4 2\nRKMINQ 1 4 3\n");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n5\n3\nNONE\n");
}

#[test]
fn unsupported_queries_fail_per_line() {
    let dir = TempDir::new().unwrap();
    let (enc, _) = build(&dir, &[2, 1, 1, 2], "a");
    let o = run_script(&dir, &enc, "PSV 4\nNSV 1\nRMINQ 1 4\nPSV 9\n");
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "3");
    assert!(lines[1].starts_with("ERROR line 2:"));
    assert_eq!(lines[2], "3");
    assert!(lines[3].starts_with("ERROR line 4:"));
    let o = run_script(&dir, &enc, "PSV 1\nFOO 2\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn corrupted_encoding_file_is_rejected() {
    let dir = TempDir::new().unwrap();
    let (enc, _) = build(&dir, &[5, 3, 3, 8, 1], "d");
    let mut bytes = fs::read(&enc).unwrap();
    bytes.truncate(bytes.len() - 3);
    fs::write(&enc, bytes).unwrap();
    let o = run_script(&dir, &enc, "PSV 1\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_in_both_formats() {
    let dir = TempDir::new().unwrap();
    let (t1, t2, b) = (p(&dir, "1.txt"), p(&dir, "2.txt"), p(&dir, "3.bin"));
    for (out, fmt) in [(&t1, "text"), (&t2, "text"), (&b, "binary")] {
        let o = srq(&["gen", "-n", "500", "-o", out, "--seed", "9", "--dup-rate", "0.4", "--format", fmt]);
        assert!(o.status.success());
    }
    let text = fs::read(&t1).unwrap();
    assert_eq!(text, fs::read(&t2).unwrap());
    let a = parse_array(&text).unwrap();
    assert_eq!(a.len(), 500);
    assert_eq!(fs::read(&b).unwrap(), write_array_binary(&a));
    let e1 = p(&dir, "t.srq");
    let e2 = p(&dir, "b.srq");
    assert!(srq(&["build", &t1, "-o", &e1]).status.success());
    assert!(srq(&["build", &b, "-o", &e2, "--format", "binary"]).status.success());
    assert_eq!(fs::read(&e1).unwrap(), fs::read(&e2).unwrap());
    assert!(!srq(&["build", &b, "-o", &e2, "--format", "text"]).status.success());
}

#[test]
fn bench_prints_one_line_per_cell() {
    let o = srq(&["bench", "--sizes", "64,256", "--variants", "b,d", "--queries", "200", "--dup-rate", "0.2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cells: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(cells.len(), 4);
    assert_eq!((cells[0]["n"].as_u64(), cells[0]["variant"].as_str()), (Some(64), Some("b")));
    assert_eq!(cells[0]["latency_ns"].as_object().unwrap().len(), 6);
    assert_eq!(cells[3]["latency_ns"].as_object().unwrap().len(), 12);
    assert!(!srq(&["bench", "--sizes", "100"]).status.success());
}

#[test]
fn selftest_passes_and_catches_corruption() {
    let o = srq(&["selftest"]);
    assert!(o.status.success());
    let r: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r["pass"], true);
    let o = Command::new(env!("CARGO_BIN_EXE_srq"))
        .args(["selftest", "--corrupt", "--seed", "4"])
        .env("SRQ_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r["pass"], false);
    assert!(r["counterexample"]["array"].is_array());
    assert!(String::from_utf8_lossy(&o.stderr).contains("counterexample"));
}

#[test]
fn threads_variable_must_be_numeric() {
    let o = Command::new(env!("CARGO_BIN_EXE_srq")).args(["selftest"]).env("SRQ_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(Path::new(env!("CARGO_BIN_EXE_srq")).exists());
}
