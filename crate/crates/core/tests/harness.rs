mod common;

use std::collections::BTreeSet;

use ocrank::fixture::{parse_fixture, FixtureBody};
use ocrank::harness::{dyck_words, enumerate, probe_density, random_transducer};
use ocrank::rank::{RocExpr, SearchCaps};
use ocrank::transducer::Transducer;
use ocrank::words::{compare, Word, WordRelation};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn parse(text: &str) -> Transducer {
    match parse_fixture(text, "inline").unwrap().body {
        FixtureBody::Machine(m) => m,
        FixtureBody::Expr(_) => unreachable!(),
    }
}

fn render(m: &Transducer, words: &[Word]) -> Vec<String> {
    words.iter().map(|w| m.alphabet().render(w)).collect()
}

#[test]
fn fig1_enumeration_is_the_expansion() {
    let m = common::machine("fig1");
    let got = enumerate(&m, 4, 6);
    let words = render(&m, &got.words);
    for w in ["ca", "cba", "ccaa", "ccbaa"] {
        assert!(words.contains(&w.to_string()), "{w}");
    }
    let mut want = BTreeSet::new();
    for n in 1..=2usize {
        // c^n followed by n blocks b^k a
        let mut blocks: Vec<String> = vec![String::new()];
        for _ in 0..n {
            blocks = blocks
                .iter()
                .flat_map(|p| (0..6).map(move |k| format!("{p}{}a", "b".repeat(k))))
                .collect();
        }
        for b in blocks {
            let w = format!("{}{b}", "c".repeat(n));
            if w.len() <= 6 {
                want.insert(m.alphabet().word(&w).unwrap());
            }
        }
    }
    assert_eq!(got.words, want.into_iter().collect::<Vec<_>>());
    assert!(got.truncated);
}

#[test]
fn single_input_with_single_output() {
    let m = parse("alphabet x\nstates p q r\ninitial p\nfinal r\ntrans p 0 q x\ntrans q 1 r eps\n");
    assert_eq!(render(&m, &enumerate(&m, 4, 4).words), ["x"]);
}

#[test]
fn zero_input_cap_without_empty_acceptance_is_empty() {
    let m = common::machine("fig1");
    assert!(enumerate(&m, 0, 10).words.is_empty());
}

#[test]
fn enumeration_agrees_with_step_languages() {
    let mut rng = StdRng::seed_from_u64(21);
    let inputs = dyck_words(6);
    for _ in 0..80 {
        let m = random_transducer(&mut rng, 4, 7);
        let got: BTreeSet<Word> = enumerate(&m, 6, 5).words.into_iter().collect();
        let mut want = BTreeSet::new();
        for u in &inputs {
            want.extend(m.step_language(u).unwrap().words_up_to(5));
        }
        assert_eq!(got, want);
    }
}

#[test]
fn enumeration_is_strictly_sorted() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..40 {
        let m = random_transducer(&mut rng, 4, 7);
        let r = enumerate(&m, 8, 6);
        for pair in r.words.windows(2) {
            let rel = compare(&pair[0], &pair[1]);
            assert!(matches!(rel, WordRelation::StrictLess | WordRelation::ProperPrefixOf), "{rel:?}");
        }
    }
}

#[test]
fn density_probes() {
    let fig1 = common::machine("fig1");
    let w = probe_density(&common::expr("plus"), SearchCaps::default()).unwrap().expect("witness");
    assert_eq!(render(&fig1, &[w.u, w.v]), ["ca", "cba"]);
    assert_eq!(w.family, "{cacbacacba,cbacacbaca}*cacbacbaca");
    assert_eq!(probe_density(&RocExpr::atom(fig1), SearchCaps::default()).unwrap(), None);
    let powers = parse("alphabet c\nstates q0 qf\ninitial q0\nfinal qf\ntrans q0 0 q0 c\ntrans q0 1 qf eps\ntrans qf 1 qf eps\n");
    assert_eq!(probe_density(&RocExpr::plus(RocExpr::atom(powers)), SearchCaps::default()).unwrap(), None);
}
