mod common;

use std::collections::HashSet;

use ocrank::check::{check_cycle_weights, check_depth, check_lift, check_monotone, check_rules};
use ocrank::components::condense;
use ocrank::counterset::reach_sets;
use ocrank::harness::{enumerate, random_transducer};
use ocrank::transducer::{
    bounded_language_equal, build_mprime, lift_run, project_run, Phase, Rule, Run, Transducer, TransducerPrime, TypedState,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn prime(m: &Transducer) -> TransducerPrime {
    build_mprime(m, &reach_sets(m).unwrap()).unwrap()
}

fn ts(m: &Transducer, q: &str, n: u64, phase: Phase) -> TypedState {
    TypedState {
        q: m.state(q).unwrap_or_else(|| panic!("no state {q}")),
        n,
        phase,
    }
}

fn parse_phase(tag: &str) -> Phase {
    match tag {
        "up" => Phase::Up,
        "eq" => Phase::Eq,
        "down" => Phase::Down,
        _ => panic!("bad phase {tag}"),
    }
}

/// `"q0 0 up"` style triples.
fn state(m: &Transducer, s: &str) -> TypedState {
    let parts: Vec<&str> = s.split_whitespace().collect();
    ts(m, parts[0], parts[1].parse().unwrap(), parse_phase(parts[2]))
}

struct Fragment {
    initial: String,
    finals: Vec<String>,
    states: Vec<String>,
    transitions: Vec<(String, u8, String)>,
}

fn fig2_fragment() -> Fragment {
    let text = std::fs::read_to_string(common::fixture_path("fig2_mprime").with_extension("fragment")).unwrap();
    let mut f = Fragment {
        initial: String::new(),
        finals: vec![],
        states: vec![],
        transitions: vec![],
    };
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w[0] {
            "initial" => f.initial = w[1..].join(" "),
            "final" => f.finals.push(w[1..].join(" ")),
            "state" => f.states.push(w[1..].join(" ")),
            "trans" => f.transitions.push((w[1..4].join(" "), w[4].parse().unwrap(), w[5..8].join(" "))),
            other => panic!("unknown line kind {other}"),
        }
    }
    f
}

#[test]
fn fig2_mprime_fragment_is_contained() {
    let m = common::machine("fig2");
    let mp = prime(&m);
    let frag = fig2_fragment();
    assert_eq!(frag.states.len(), 33);
    for s in &frag.states {
        assert!(mp.find(&state(&m, s)).is_some(), "missing state {s}");
    }
    let edges: HashSet<(TypedState, u8, TypedState)> = mp
        .transitions()
        .iter()
        .map(|t| (mp.states()[t.from], t.bit, mp.states()[t.to]))
        .collect();
    for (a, bit, b) in &frag.transitions {
        assert!(edges.contains(&(state(&m, a), *bit, state(&m, b))), "missing {a} -{bit}-> {b}");
    }
    assert_eq!(mp.initial(), mp.find(&state(&m, &frag.initial)));
    let finals: HashSet<TypedState> = mp.finals().map(|s| mp.states()[s]).collect();
    assert_eq!(finals, frag.finals.iter().map(|s| state(&m, s)).collect());
}

#[test]
fn fig2_path_projects() {
    let m = common::machine("fig2");
    let mp = prime(&m);
    let path = ["q0 0 up", "q1 1 up", "q4 2 up", "q7 1 up", "q8 0 down"].map(|s| mp.find(&state(&m, s)).unwrap());
    let transitions: Vec<usize> = path
        .windows(2)
        .map(|w| mp.transitions().iter().position(|t| t.from == w[0] && t.to == w[1]).unwrap())
        .collect();
    let run = Run {
        start: path[0],
        transitions,
    };
    assert!(mp.is_accepting_run(&run));
    let projected = project_run(&mp, &run);
    let mut q = projected.start;
    let mut names = vec![m.name(q).to_string()];
    for &i in &projected.transitions {
        assert_eq!(m.transitions()[i].from, q);
        q = m.transitions()[i].to;
        names.push(m.name(q).to_string());
    }
    assert_eq!(names, ["q0", "q1", "q4", "q7", "q8"]);
    assert!(m.is_final(q));
}

#[test]
fn non_accepting_runs_project_to_non_accepting_runs() {
    let m = common::machine("fig2");
    let mp = prime(&m);
    let start = mp.initial().unwrap();
    let first = mp.transitions().iter().position(|t| t.from == start).unwrap();
    let run = Run {
        start,
        transitions: vec![first],
    };
    assert!(!mp.is_accepting_run(&run));
    let p = project_run(&mp, &run);
    assert!(!m.is_final(m.transitions()[p.transitions[0]].to));
}

#[test]
fn lift_project_round_trip_on_fixtures() {
    for name in common::MACHINES {
        let mp = prime(&common::machine(name));
        let (fail, runs) = check_lift(&mp, 12);
        assert_eq!(fail, None, "{name}");
        assert!(runs > 0, "{name}");
    }
}

#[test]
fn fig1_lifts() {
    let m = common::machine("fig1");
    let mp = prime(&m);
    assert_eq!(mp.period(), 2);
    let find = |bits: &[u8]| -> Run {
        m.accepting_runs(bits.len())
            .into_iter()
            .find(|r| m.run_input(r).symbols().iter().map(|&s| s as u8).eq(bits.iter().copied()))
            .unwrap()
    };
    let short = lift_run(&mp, &find(&[0, 1])).unwrap();
    let phases: Vec<Phase> = std::iter::once(short.start)
        .chain(short.transitions.iter().map(|&i| mp.transitions()[i].to))
        .map(|s| mp.states()[s].phase)
        .collect();
    assert_eq!(phases, [Phase::Up, Phase::Up, Phase::Down]);
    assert!(mp.is_accepting_run(&short));

    let deep = lift_run(&mp, &find(&[0, 0, 1, 1])).unwrap();
    let states: Vec<TypedState> = std::iter::once(deep.start)
        .chain(deep.transitions.iter().map(|&i| mp.transitions()[i].to))
        .map(|s| mp.states()[s])
        .collect();
    let expect = [
        ts(&m, "q0", 0, Phase::Up),
        ts(&m, "q0", 1, Phase::Up),
        ts(&m, "q0", 2, Phase::Eq),
        ts(&m, "qf", 1, Phase::Down),
        ts(&m, "qf", 0, Phase::Down),
    ];
    assert_eq!(states, expect);
    let rules: Vec<Rule> = deep.transitions.iter().map(|&i| mp.transitions()[i].rule).collect();
    assert_eq!(rules, [Rule::I, Rule::III, Rule::IV, Rule::II]);
}

#[test]
fn empty_run_lifts_to_empty_run() {
    let text = "alphabet a\nstates q\ninitial q\nfinal q\ntrans q 0 q a\n";
    let ocrank::fixture::FixtureBody::Machine(m) = ocrank::fixture::parse_fixture(text, "e").unwrap().body else {
        unreachable!()
    };
    let mp = prime(&m);
    let lifted = lift_run(&mp, &Run {
        start: m.initial(),
        transitions: vec![],
    })
    .unwrap();
    assert!(lifted.transitions.is_empty());
    assert!(mp.is_accepting_run(&lifted));
}

#[test]
fn lift_rejects_bad_runs() {
    let m = common::machine("fig1");
    let mp = prime(&m);
    let zero = m.transitions().iter().position(|t| t.bit == 0).unwrap();
    let run = Run {
        start: m.initial(),
        transitions: vec![zero],
    };
    assert!(lift_run(&mp, &run).is_err());
}

#[test]
fn bounded_equivalence_on_fixtures() {
    for name in common::MACHINES {
        let m = common::machine(name);
        let eq = bounded_language_equal(&m, &prime(&m), 12, 40);
        assert!(eq.equal, "{name}: {:?}", eq.counterexample);
    }
}

#[test]
fn deleting_a_rule_iii_transition_breaks_equivalence() {
    let m = common::machine("fig1");
    let mp = prime(&m);
    let members: HashSet<_> = enumerate(&m, 12, 40).words.into_iter().collect();
    let rule3: Vec<usize> = (0..mp.transitions().len()).filter(|&i| mp.transitions()[i].rule == Rule::III).collect();
    assert!(!rule3.is_empty());
    for i in rule3 {
        let eq = bounded_language_equal(&m, &mp.without_transition(i), 12, 40);
        assert!(!eq.equal, "deleting {i} kept the language");
        let w = eq.counterexample.expect("explicit witness");
        assert!(members.contains(&w), "witness {} is not a member of L(M)", m.alphabet().render(&w));
    }
}

#[test]
fn fig2_condensation_shape() {
    let m = common::machine("fig2");
    let mp = prime(&m);
    let cond = condense(&mp).unwrap();
    let comp = |s: &str| cond.component_of[mp.find(&state(&m, s)).unwrap()];
    let init = comp("q0 0 up");
    assert!(cond.sccs[init].trivial);
    assert!(mp.transitions().iter().all(|t| cond.component_of[t.to] != init));
    for f in ["q5 0 down", "q8 0 down"] {
        let c = comp(f);
        assert!(cond.sccs[c].trivial, "{f}");
        assert!(mp.transitions().iter().all(|t| cond.component_of[t.from] != c), "{f}");
    }
    let eq = comp("q0 6 eq");
    for s in ["q0 9 eq", "q1 7 eq", "q1 10 eq", "q2 8 eq", "q2 11 eq", "q3 8 eq", "q3 11 eq"] {
        assert_eq!(comp(s), eq, "{s}");
    }
    assert!(!cond.sccs[eq].trivial);
    assert_eq!(cond.sccs[eq].phase, Phase::Eq);
}

#[test]
fn single_path_machine_has_trivial_components() {
    let text = "alphabet a\nstates p q r\ninitial p\nfinal r\ntrans p 0 q a\ntrans q 1 r a\n";
    let ocrank::fixture::FixtureBody::Machine(m) = ocrank::fixture::parse_fixture(text, "p").unwrap().body else {
        unreachable!()
    };
    let cond = condense(&prime(&m)).unwrap();
    assert!(cond.sccs.iter().all(|c| c.trivial));
}

/// Closed walks of length ≤ `max_len` anywhere in `M′` have weight ≡ 0 mod P.
fn cycle_weights_divisible(mp: &TransducerPrime, max_len: usize) -> Option<String> {
    let p = mp.period() as i64;
    for s in 0..mp.num_states() {
        let mut frontier: HashSet<(usize, i64)> = HashSet::from([(s, 0)]);
        for _ in 0..max_len {
            let mut next = HashSet::new();
            for &(x, w) in &frontier {
                for t in mp.transitions().iter().filter(|t| t.from == x) {
                    let nw = w + if t.bit == 0 { 1 } else { -1 };
                    if t.to == s && nw.rem_euclid(p) != 0 {
                        return Some(format!("closed walk at {} has weight {nw}", mp.label(s)));
                    }
                    next.insert((t.to, nw));
                }
            }
            frontier = next;
        }
    }
    None
}

#[test]
fn invariants_on_random_machines() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let m = random_transducer(&mut rng, 5, 8);
        let mp = prime(&m);
        let ctx = ocrank::fixture::render_fixture(&ocrank::fixture::Fixture {
            name: "random".into(),
            body: ocrank::fixture::FixtureBody::Machine(m.clone()),
        });
        assert_eq!(check_rules(&mp), None, "{ctx}");
        assert_eq!(check_monotone(&mp), None, "{ctx}");
        assert_eq!(check_depth(&mp, 10), None, "{ctx}");
        assert_eq!(check_cycle_weights(&mp, 12), None, "{ctx}");
        assert_eq!(cycle_weights_divisible(&mp, 12), None, "{ctx}");
        assert_eq!(check_lift(&mp, 10).0, None, "{ctx}");
    }
}

#[test]
fn random_machines_keep_their_language() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..60 {
        let m = random_transducer(&mut rng, 4, 7);
        let eq = bounded_language_equal(&m, &prime(&m), 8, 16);
        assert!(eq.equal, "{:?}", eq.counterexample);
    }
}
