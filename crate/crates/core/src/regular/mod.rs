//! Regular languages over an [`OrderedAlphabet`](crate::words::OrderedAlphabet):
//! parsing, compilation to trimmed DFAs, inclusion in `v*`, and the
//! scatteredness test with its finite rank bound.

mod automaton;
mod regex;

pub use automaton::{Automaton, Embedded, Nfa};
pub use regex::{parse_regex, Regex};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::words::{primitive_root, Word};

pub fn compile(r: &Regex, alphabet_len: usize) -> Automaton {
    Automaton::from_regex(r, alphabet_len)
}

pub fn membership(a: &Automaton, w: &Word) -> Result<bool> {
    a.accepts(w)
}

pub fn shortest_word(a: &Automaton) -> Option<Word> {
    a.shortest_word()
}

/// Decides `L(a) ⊆ v*` exactly.
pub fn subset_of_power(a: &Automaton, v: &Word) -> Result<bool> {
    let power = Automaton::power_of(v, a.alphabet_len())?;
    Ok(a.is_subset_of(&power))
}

/// Outcome of checking one language for a common primitive root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootCheck {
    /// The language has no nonempty member.
    Trivial,
    /// Every member lies in `root*`.
    Common(Word),
    /// Two members with distinct primitive roots.
    Split(Word, Word),
}

/// Tests whether all members of `lang` are powers of one primitive word,
/// taking the candidate from the length-lexicographically least nonempty member.
pub fn common_root(lang: &Automaton) -> RootCheck {
    let Some(x) = lang.shortest_nonempty_word() else {
        return RootCheck::Trivial;
    };
    let v = primitive_root(&x).expect("nonempty");
    let power = Automaton::power_of(&v, lang.alphabet_len()).expect("nonempty root");
    match lang.difference(&power).shortest_word() {
        None => RootCheck::Common(v),
        Some(y) => RootCheck::Split(x, y),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scatteredness {
    Scattered,
    QuasiDense { state: u32, x: Word, y: Word },
}

/// A trimmed DFA denotes a scattered ordering iff every state's cycle words
/// share one primitive root.
pub fn regular_scattered(a: &Automaton) -> Scatteredness {
    for s in 0..a.num_states() as u32 {
        if let RootCheck::Split(x, y) = common_root(&a.cycle_language(s)) {
            return Scatteredness::QuasiDense { state: s, x, y };
        }
    }
    Scatteredness::Scattered
}

/// Maximum number of nontrivial strongly connected components met along a
/// path of the condensation. An upper bound on the rank of a scattered `L(a)`.
pub fn finite_rank_bound(a: &Automaton) -> Result<u64> {
    if let Scatteredness::QuasiDense { x, y, .. } = regular_scattered(a) {
        return Err(Error::Precondition(format!(
            "language is not scattered (cycle words {x} and {y} have distinct roots)"
        )));
    }
    Ok(max_loops_on_path(&a.graph()))
}

/// Longest chain of nontrivial SCCs in a digraph given by successor lists.
pub(crate) fn max_loops_on_path(succ: &[Vec<u32>]) -> u64 {
    let mut g = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..succ.len()).map(|_| g.add_node(())).collect();
    for (s, ts) in succ.iter().enumerate() {
        for &t in ts {
            g.add_edge(nodes[s], nodes[t as usize], ());
        }
    }
    // tarjan_scc yields components in reverse topological order
    let sccs = tarjan_scc(&g);
    let mut comp = vec![0usize; succ.len()];
    for (i, c) in sccs.iter().enumerate() {
        for n in c {
            comp[n.index()] = i;
        }
    }
    let mut best = vec![0u64; sccs.len()];
    for (i, c) in sccs.iter().enumerate() {
        let nontrivial = c.len() > 1 || succ[c[0].index()].contains(&(c[0].index() as u32));
        let mut down = 0;
        for n in c {
            for &t in &succ[n.index()] {
                let j = comp[t as usize];
                if j != i {
                    down = down.max(best[j]);
                }
            }
        }
        best[i] = down + nontrivial as u64;
    }
    best.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::OrderedAlphabet;
    use proptest::prelude::*;

    fn bin(text: &str) -> Automaton {
        let a = OrderedAlphabet::binary();
        compile(&parse_regex(text, &a).unwrap(), 2)
    }

    fn w(text: &str) -> Word {
        OrderedAlphabet::binary().word(text).unwrap()
    }

    /// Backtracking matcher over the AST.
    fn matches(r: &Regex, s: &[u16]) -> bool {
        fn go(r: &Regex, s: &[u16], i: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
            match r {
                Regex::Empty => false,
                Regex::Epsilon => k(i),
                Regex::Letter(a) => i < s.len() && s[i] == *a && k(i + 1),
                Regex::Union(a, b) => go(a, s, i, k) || go(b, s, i, k),
                Regex::Concat(a, b) => go(a, s, i, &mut |j| go(b, s, j, k)),
                Regex::Star(a) => {
                    if k(i) {
                        return true;
                    }
                    go(a, s, i, &mut |j| j > i && go(r, s, j, k))
                }
            }
        }
        go(r, s, 0, &mut |j| j == s.len())
    }

    fn all_words(k: u16, max_len: usize) -> Vec<Vec<u16>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for a in 0..k {
                    let mut x: Vec<u16> = w.clone();
                    x.push(a);
                    next.push(x);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn compile_examples() {
        let abc = OrderedAlphabet::new("abc".chars()).unwrap();
        let a = compile(&parse_regex("b*a", &abc).unwrap(), 3);
        for (s, ok) in [("a", true), ("ba", true), ("bba", true), ("ab", false), ("", false)] {
            assert_eq!(membership(&a, &abc.word(s).unwrap()).unwrap(), ok, "{s}");
        }
        let e = bin("eps");
        assert!(membership(&e, &w("")).unwrap());
        assert!(!membership(&e, &w("0")).unwrap());
        let c = compile(&parse_regex("c", &abc).unwrap(), 3);
        assert!(membership(&c, &abc.word("c").unwrap()).unwrap());
        assert!(membership(&c, &Word(vec![7])).is_err());
    }

    #[test]
    fn compile_matches_brute_force() {
        let a = OrderedAlphabet::binary();
        let r = parse_regex("(00+11)*01", &a).unwrap();
        let d = compile(&r, 2);
        for s in ["01", "0001", "1101"] {
            assert!(membership(&d, &w(s)).unwrap());
        }
        for s in all_words(2, 10) {
            assert_eq!(d.accepts(&Word(s.clone())).unwrap(), matches(&r, &s));
        }
    }

    #[test]
    fn shortest_word_examples() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let a = compile(&parse_regex("b*a", &ab).unwrap(), 2);
        assert_eq!(ab.render(&shortest_word(&a).unwrap()), "a");
        assert_eq!(shortest_word(&Automaton::empty(2)), None);
        let a = compile(&parse_regex("(ba+ab)", &ab).unwrap(), 2);
        assert_eq!(ab.render(&shortest_word(&a).unwrap()), "ab");
    }

    #[test]
    fn subset_of_power_examples() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let l = compile(&parse_regex("abab+ab+eps", &ab).unwrap(), 2);
        assert!(subset_of_power(&l, &ab.word("ab").unwrap()).unwrap());
        let l = compile(&parse_regex("b*a", &ab).unwrap(), 2);
        assert!(!subset_of_power(&l, &ab.word("a").unwrap()).unwrap());
        assert!(subset_of_power(&l, &Word::empty()).is_err());

        let c = OrderedAlphabet::new("c".chars()).unwrap();
        let l = compile(&parse_regex("(cc)*", &c).unwrap(), 1);
        assert!(subset_of_power(&l, &c.word("c").unwrap()).unwrap());
        let brute = l.words_up_to(12).iter().all(|x| x.symbols().iter().all(|&s| s == 0));
        assert!(brute);
    }

    #[test]
    fn scatteredness_examples() {
        assert_eq!(regular_scattered(&bin("0*")), Scatteredness::Scattered);
        assert_eq!(regular_scattered(&bin("0*1")), Scatteredness::Scattered);
        match regular_scattered(&bin("(00+11)*01")) {
            Scatteredness::QuasiDense { x, y, .. } => {
                assert_eq!((x, y), (w("00"), w("11")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rank_bound_examples() {
        assert_eq!(finite_rank_bound(&bin("0*")).unwrap(), 1);
        assert_eq!(finite_rank_bound(&bin("0+1")).unwrap(), 0);
        assert_eq!(finite_rank_bound(&bin("0*10*")).unwrap(), 2);
        assert!(matches!(finite_rank_bound(&bin("(0+1)*")), Err(Error::Precondition(_))));
    }

    fn arb_regex() -> impl Strategy<Value = Regex> {
        let leaf = prop_oneof![
            Just(Regex::Epsilon),
            Just(Regex::Letter(0)),
            Just(Regex::Letter(1)),
            Just(Regex::Empty),
        ];
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Regex::union(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Regex::concat(a, b)),
                inner.prop_map(Regex::star),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn compile_agrees_with_matcher(r in arb_regex()) {
            let d = compile(&r, 2);
            for s in all_words(2, 8) {
                prop_assert_eq!(d.accepts(&Word(s.clone())).unwrap(), matches(&r, &s));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn subset_of_power_agrees_on_finite_languages(r in arb_regex(), v in prop::collection::vec(0u16..2, 1..3)) {
            let d = compile(&r, 2);
            let v = Word(v);
            if let Some(max) = d.max_word_len() {
                let brute = d.words_up_to(max).iter().all(|x| {
                    x.len() % v.len() == 0 && x.symbols().chunks(v.len()).all(|c| c == v.symbols())
                });
                prop_assert_eq!(subset_of_power(&d, &v).unwrap(), brute);
            }
        }

        #[test]
        fn scattered_agrees_with_cycle_search(r in arb_regex()) {
            let d = compile(&r, 2);
            let brute = (0..d.num_states() as u32).any(|s| {
                let cyc = d.cycle_language(s).words_up_to(10);
                let roots: std::collections::BTreeSet<Word> =
                    cyc.iter().map(|x| primitive_root(x).unwrap()).collect();
                roots.len() > 1
            });
            let quasi = matches!(regular_scattered(&d), Scatteredness::QuasiDense { .. });
            prop_assert_eq!(quasi, brute);
        }

        #[test]
        fn rank_bound_monotone_under_union(r1 in arb_regex(), r2 in arb_regex()) {
            let (a, b) = (compile(&r1, 2), compile(&r2, 2));
            if let (Ok(x), Ok(y)) = (finite_rank_bound(&a), finite_rank_bound(&b)) {
                // disjoint union of state graphs
                let mut succ = a.graph();
                let off = succ.len() as u32;
                succ.extend(b.graph().into_iter().map(|ts| ts.into_iter().map(|t| t + off).collect()));
                let z = max_loops_on_path(&succ);
                prop_assert_eq!(z, x.max(y));
            }
        }
    }
}
