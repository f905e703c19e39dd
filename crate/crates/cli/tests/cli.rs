use std::path::Path;
use std::process::{Command, Output};

use nilfill::bench::{bench_compression, bench_fill, fit_exponent, write_csv, BenchError};
use nilfill::format::{parse_presentation, parse_trace, validate_trace, write_presentation, write_trace, Verdict};
use nilfill_core::filler::build_filler_presentation;
use nilfill_core::sequence::random_sequence;
use nilfill_core::{build_chain_presentation, Move, PSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nilfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilfill")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn presentation_round_trip() {
    for p in [build_chain_presentation(3, 2), build_filler_presentation(2, 3).unwrap()] {
        let text = write_presentation(&p);
        assert_eq!(parse_presentation(&text).unwrap(), p);
    }
    let p = parse_presentation("# two letters\nclass 1\ngen a 1\ngen b 1\nrel a^-1 b^-1 a b # abelian\n").unwrap();
    assert_eq!(p.relators.len(), 1);
    assert_eq!(parse_presentation("gen a 1\n").unwrap_err().reason, "missing class line");
    assert_eq!(parse_presentation("class 1\ngen a 1\nrel a c\n").unwrap_err().line, 3);
}

#[test]
fn trace_round_trip_is_bit_exact() {
    let p = build_filler_presentation(2, 2).unwrap();
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_sequence(&p, &mut rng, 6, 25);
        let text = write_trace(&p, &t, "f.pres");
        let parsed = parse_trace(&text, &p).unwrap();
        assert_eq!(parsed.sequence, t);
        assert_eq!(parsed.presentation_path, "f.pres");
        assert_eq!(write_trace(&p, &parsed.sequence, "f.pres"), text);
    }
}

#[test]
fn validator_reports_the_offending_line() {
    let p = build_chain_presentation(2, 1);
    let t = PSequence {
        initial: p.parse_word("x1 x1^-1 x2").unwrap(),
        moves: vec![Move::FreeReduction { pos: 0 }, Move::FreeReduction { pos: 0 }],
    };
    let text = write_trace(&p, &t, "p.pres");
    match validate_trace(&text, &p, None) {
        Verdict::Error { line, .. } => assert_eq!(line, 4),
        v => panic!("{v}"),
    }
    let ok = PSequence { initial: t.initial.clone(), moves: vec![Move::FreeReduction { pos: 0 }] };
    let text = write_trace(&p, &ok, "p.pres");
    assert!(validate_trace(&text, &p, None).to_string().starts_with("error line=4 "));
    let x2 = p.parse_word("x2").unwrap();
    assert_eq!(validate_trace(&text, &p, Some(&x2)).to_string(), "ok area=0 fl=3 height=1");
    assert!(!validate_trace("word: x1\npresentation: p\nfr 0\n", &p, None).is_ok());
    assert!(!validate_trace("word: x1\npresentation: p\nzz 0\nqed\n", &p, None).is_ok());
}

#[test]
fn fit_examples() {
    let cubic: Vec<(f64, f64)> = (2..=10).map(|n| (n as f64, (n * n * n) as f64)).collect();
    assert!((fit_exponent(&cubic).unwrap().slope - 3.0).abs() < 1e-9);
    let linear: Vec<(f64, f64)> = (1..=6).map(|n| (n as f64, 7.0 * n as f64)).collect();
    assert!((fit_exponent(&linear).unwrap().slope - 1.0).abs() < 1e-9);
    let noise = [1.05, 0.95, 1.03, 0.97, 1.05, 0.95, 1.02, 0.98, 1.0];
    let perturbed: Vec<(f64, f64)> = (2..=10).zip(noise).map(|(n, e)| (n as f64, e * (n * n * n) as f64)).collect();
    let s = fit_exponent(&perturbed).unwrap().slope;
    assert!((2.9..=3.1).contains(&s), "{s}");
    assert!(matches!(fit_exponent(&cubic[..3]), Err(BenchError::InsufficientData(3))));
    let unsorted = [(3.0, 27.0), (2.0, 8.0), (4.0, 64.0), (5.0, 125.0)];
    assert!(fit_exponent(&unsorted).is_err());
}

#[test]
fn bench_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let fill = bench_fill(2, 2, &[8, 12], 10, 4, &dir.path().join(sub)).unwrap();
        let mut buf = Vec::new();
        write_csv(&fill.records, &mut buf, false).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert!(a.starts_with("c,n,op,len_initial,area,fl,height,seconds\n"));
    assert_eq!(a.lines().count(), 21);
    let comp = bench_compression(1, &[2, 3, 4, 5], dir.path()).unwrap();
    assert!(comp.records.iter().all(|r| r.area == 0));
    assert!(comp.fit.is_none());
}

#[test]
fn cli_compress_fill_validate() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("c.trace");
    let o = nilfill(&["compress", "--class", "2", "--n", "2", "--trace", path(&trace)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("ok area="));
    let pres = dir.path().join("c.trace.pres");
    let o = nilfill(&["validate", "--trace", path(&trace), "--presentation", path(&pres), "--final", "x1^-2 x2^-2 x1^2 x2^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok area="));
    let o = nilfill(&["validate", "--trace", path(&trace), "--presentation", path(&pres)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("error line="));

    let spec_trace = dir.path().join("s.trace");
    let o = nilfill(&["compress", "--class", "3", "--n", "2", "--spec", "x1,x1,x2", "--trace", path(&spec_trace)]);
    assert!(o.status.success());

    let word_file = dir.path().join("w.txt");
    std::fs::write(&word_file, "x1^-2 x2^-2 x1^2 x2^2 g_1_2^-4\n").unwrap();
    let fill_trace = dir.path().join("f.trace");
    let o = nilfill(&["fill", "--class", "2", "--gens", "2", "--word", path(&word_file), "--trace", path(&fill_trace)]);
    assert!(o.status.success());
    let printed = stdout(&o);
    let o = nilfill(&["validate", "--trace", path(&fill_trace), "--presentation", &format!("{}.pres", path(&fill_trace))]);
    assert_eq!(stdout(&o), printed);

    let o = nilfill(&["fill", "--class", "2", "--gens", "2", "--word", "x1 x2 x1^-1 x2^-1", "--trace", path(&fill_trace)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cli_oracle_corpus_and_usage() {
    let o = nilfill(&["oracle", "eval", "--class", "2", "x1^-1 x2^-1 x1 x2"]);
    assert_eq!(stdout(&o), "1 1\nX1*X2 1\nX2*X1 -1\n");
    assert_eq!(nilfill(&["oracle", "check", "--class", "2", "x1^-1 x2^-1 x1 x2"]).status.code(), Some(1));
    assert_eq!(nilfill(&["oracle", "check", "--class", "1", "x1^-1 x2^-1 x1 x2"]).status.code(), Some(0));
    let a = stdout(&nilfill(&["corpus", "--class", "2", "--gens", "2", "--n", "12", "--count", "5", "--seed", "9"]));
    let b = stdout(&nilfill(&["corpus", "--class", "2", "--gens", "2", "--n", "12", "--count", "5", "--seed", "9"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    assert_eq!(nilfill(&["fill", "--class", "2"]).status.code(), Some(2));
    assert_eq!(nilfill(&["oracle", "eval", "--class", "2", "y7"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.pres");
    assert_eq!(nilfill(&["present", "--class", "2", "--out", path(&out)]).status.code(), Some(2));
    assert!(nilfill(&["present", "--class", "2", "--chain", "1", "--out", path(&out)]).status.success());
    assert_eq!(parse_presentation(&std::fs::read_to_string(&out).unwrap()).unwrap(), build_chain_presentation(2, 1));
}
