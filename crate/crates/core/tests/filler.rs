use nilfill_core::filler::{
    build_filler, build_filler_presentation, certify_afl_pair, corpus_generate, fill, fill_with_report, project_word,
    quotient_presentation, select_basis, FillerPresentation,
};
use nilfill_core::oracle::Oracle;
use nilfill_core::sequence::{replay_with, validate_null};
use nilfill_core::{Error, Metrics, PSequence, Word};

fn parse(fp: &FillerPresentation, s: &str) -> Word {
    fp.presentation.parse_word(s).unwrap()
}

fn id(fp: &FillerPresentation, name: &str) -> u32 {
    fp.presentation.generator_id(name).unwrap()
}

fn check_fill(fp: &FillerPresentation, w: &Word) -> (PSequence, Metrics) {
    let seq = fill(w, fp).unwrap_or_else(|e| panic!("{}: {e:?}", fp.presentation.format_word(w)));
    assert_eq!(&seq.initial, w);
    let m = validate_null(&fp.presentation, &seq).unwrap();
    assert!(m.area <= m.height);
    (seq, m)
}

#[test]
fn generator_layers() {
    let fp = build_filler(3, 2).unwrap();
    let p = &fp.presentation;
    let names: Vec<&str> = p.generators.iter().map(|g| g.name.as_str()).collect();
    assert_eq!(&names[..6], &["x1", "x2", "g_1_1", "g_1_2", "g_2_1", "g_2_2"]);
    assert_eq!(names.len(), 2 + 4 + 8);
    assert_eq!(p.generators[id(&fp, "g_1_1_2") as usize].definition, Some((0, id(&fp, "g_1_2"))));
    for g in &p.generators {
        assert_eq!(g.weight as usize, g.name.split('_').count().max(2) - 1);
    }
}

#[test]
fn relators_are_identities() {
    for (c, m) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        let p = build_filler_presentation(c, m).unwrap();
        let oracle = Oracle::new(&p, c);
        for r in &p.relators {
            assert!(oracle.is_identity(r), "c={c} m={m}: {}", p.format_word(r));
            assert!(!r.is_freely_trivial());
        }
        let mut sorted = p.relators.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), p.relators.len());
    }
}

#[test]
fn class_one_is_all_two_letter_commutators() {
    let p = build_filler_presentation(1, 2).unwrap();
    let mut expected = Vec::new();
    for a in ["x1", "x1^-1", "x2", "x2^-1"] {
        for b in ["x1", "x1^-1", "x2", "x2^-1"] {
            let w = p.parse_word(&format!("{a}^-1 {b}^-1 {a} {b}").replace("^-1^-1", "")).unwrap();
            if !w.is_freely_trivial() && !expected.contains(&w) {
                expected.push(w);
            }
        }
    }
    let mut got = p.relators.clone();
    got.sort();
    expected.sort();
    assert_eq!(got, expected);
}

#[test]
fn basis_class_two() {
    let fp = build_filler(2, 2).unwrap();
    let b = select_basis(&fp.presentation).unwrap();
    assert_eq!(b.chosen, vec![id(&fp, "g_1_2")]);
    assert_eq!(b.t, 1);
    assert_eq!(b.rewrite[&id(&fp, "g_2_1")], parse(&fp, "g_1_2^-1"));
    assert!(b.rewrite[&id(&fp, "g_1_1")].is_empty());
    assert!(b.rewrite[&id(&fp, "g_2_2")].is_empty());
}

#[test]
fn basis_sizes_match_necklace_counts() {
    // aperiodic binary/ternary necklaces of length c, counted by brute force
    fn necklaces(m: usize, c: usize) -> usize {
        let mut count = 0;
        for code in 0..m.pow(c as u32) {
            let w: Vec<usize> = (0..c).map(|i| code / m.pow(i as u32) % m).collect();
            let rots: Vec<Vec<usize>> = (0..c).map(|r| [&w[r..], &w[..r]].concat()).collect();
            if (1..c).all(|r| rots[r] > w) {
                count += 1;
            }
        }
        count
    }
    for (c, m) in [(1, 2), (2, 2), (2, 3), (3, 2)] {
        let fp = build_filler(c, m).unwrap();
        assert_eq!(fp.basis.chosen.len(), necklaces(m as usize, c as usize), "c={c} m={m}");
        let oracle = Oracle::new(&fp.presentation, c);
        for (&a, v) in &fp.basis.rewrite {
            let mut w = Word::letter(nilfill_core::Letter::pos(a));
            w.extend_from(&v.inverse());
            assert!(oracle.is_identity(&w));
        }
    }
}

#[test]
fn projection_examples() {
    let fp = build_filler(2, 2).unwrap();
    let p = &fp.presentation;
    let w = parse(&fp, "x1 x2 x1^-1");
    assert_eq!(project_word(&w, p), w);
    assert!(project_word(&parse(&fp, "g_1_2^5"), p).is_empty());
    let n = 3;
    let w = parse(&fp, &format!("x1^-{n} x2^-{n} x1^{n} x2^{n} g_1_2^-{}", n * n));
    assert_eq!(project_word(&w, p), parse(&fp, &format!("x1^-{n} x2^-{n} x1^{n} x2^{n}")));
}

#[test]
fn quotient_contains_lower_filler() {
    for (c, m) in [(2, 2), (3, 2), (2, 3)] {
        let fp = build_filler(c, m).unwrap();
        let q = quotient_presentation(&fp.presentation);
        let lower = build_filler_presentation(c - 1, m).unwrap();
        assert_eq!(q.generators, lower.generators);
        for r in &lower.relators {
            assert!(q.relators.contains(r), "{}", lower.format_word(r));
        }
    }
}

#[test]
fn empty_word_has_empty_filling() {
    for c in 1..=3 {
        let fp = build_filler(c, 2).unwrap();
        let seq = fill(&Word::empty(), &fp).unwrap();
        assert!(seq.moves.is_empty());
    }
}

#[test]
fn non_null_word_is_vetoed() {
    let fp = build_filler(2, 2).unwrap();
    assert_eq!(fill(&parse(&fp, "x1 x2 x1^-1 x2^-1"), &fp), Err(Error::NotNullHomotopic));
    let fp = build_filler(1, 2).unwrap();
    assert_eq!(fill(&parse(&fp, "x1 x2"), &fp), Err(Error::NotNullHomotopic));
}

#[test]
fn every_relator_fills() {
    for c in 1..=3 {
        let fp = build_filler(c, 2).unwrap();
        for r in fp.presentation.relators.iter().step_by(if c == 3 { 7 } else { 1 }) {
            let (_, rep) = fill_with_report(r, &fp).unwrap();
            let m = check_fill(&fp, r).1;
            assert_eq!(m, rep.metrics);
        }
    }
}

#[test]
fn intermediate_words_stay_equal() {
    let fp = build_filler(3, 2).unwrap();
    let oracle = Oracle::new(&fp.presentation, 3);
    for w in corpus_generate(&fp, 10, 6, 3) {
        let (seq, _) = check_fill(&fp, &w);
        replay_with(&fp.presentation, &seq, |i, cur| {
            if i % 97 == 0 {
                assert!(oracle.is_identity(cur));
            }
        })
        .unwrap();
    }
}

#[test]
fn commutator_power_family() {
    let fp = build_filler(2, 2).unwrap();
    let mut results = Vec::new();
    for n in 2..=10 {
        let w = parse(&fp, &format!("x1^-{n} x2^-{n} x1^{n} x2^{n} g_1_2^-{}", n * n));
        let (_, rep) = fill_with_report(&w, &fp).unwrap();
        assert!(rep.max_register <= rep.register_bound);
        results.push((w.len(), rep.metrics));
    }
    let cert = certify_afl_pair(&results, 2);
    assert!(cert.lambda < 10.0, "{cert:?}");
}

#[test]
fn abelian_base_case_bounds() {
    let fp = build_filler(1, 3).unwrap();
    for w in corpus_generate(&fp, 20, 60, 11) {
        let (_, m) = check_fill(&fp, &w);
        let l = w.len() as u64;
        assert!(m.area <= l * l);
        assert_eq!(m.fl, l);
    }
}

#[test]
fn corpus_contract() {
    let fp = build_filler(2, 2).unwrap();
    assert!(corpus_generate(&fp, 12, 0, 1).is_empty());
    let a = corpus_generate(&fp, 12, 40, 5);
    let b = corpus_generate(&fp, 12, 40, 5);
    let c = corpus_generate(&fp, 12, 80, 5);
    assert_eq!(a, b);
    assert_eq!(&c[..40], &a[..]);
    let oracle = Oracle::new(&fp.presentation, 2);
    for w in &c {
        assert!(!w.is_empty() && w.len() <= 12);
        assert!(oracle.is_identity(w));
    }
}

#[test]
fn certificate_examples() {
    assert_eq!(certify_afl_pair(&[(0, Metrics::default())], 2).lambda, 0.0);
    let m = Metrics { area: 16, fl: 12, height: 20, final_length: 0 };
    let cert = certify_afl_pair(&[(2, m), (4, Metrics { area: 1, fl: 4, height: 3, final_length: 0 })], 2);
    assert_eq!(cert.area_lambda, 2.0);
    assert_eq!(cert.fl_lambda, 6.0);
    assert_eq!(cert.lambda, 6.0);
    assert_eq!(cert.worst_fl, Some((2, m)));
}
