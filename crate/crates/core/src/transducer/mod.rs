//! Regular transducers over Dyck input and their depth-typed normalization.

mod prime;

pub use prime::{
    bounded_language_equal, build_mprime, lift_run, project_run, Equivalence, Phase, PrimeTransition,
    Rule, TransducerPrime, TypedState,
};

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::regular::{Automaton, Nfa, Regex};
use crate::words::{OrderedAlphabet, Word};

/// One transition `(from, bit, to)` with its output expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub from: usize,
    pub bit: u8,
    pub to: usize,
    pub output: Regex,
}

/// `M = (Q, Σ, Δ, q0, F, μ)`: reads 0/1, emits one member of `μ(δ)` per step.
#[derive(Debug, Clone)]
pub struct Transducer {
    alphabet: OrderedAlphabet,
    names: Vec<String>,
    initial: usize,
    finals: Vec<bool>,
    transitions: Vec<Transition>,
    outputs: Vec<Automaton>,
    empty_input: bool,
}

impl PartialEq for Transducer {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.names == other.names
            && self.initial == other.initial
            && self.finals == other.finals
            && self.transitions == other.transitions
            && self.empty_input == other.empty_input
    }
}

impl Eq for Transducer {}

/// A run: the start state followed by the transitions taken, by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub transitions: Vec<usize>,
}

impl Transducer {
    /// Builds a machine, rejecting dangling indices, repeated `(p, bit, q)`
    /// triples, non-binary bits and outputs denoting the empty language.
    pub fn new(
        alphabet: OrderedAlphabet,
        names: Vec<String>,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Validation("machine has no states".into()));
        }
        let distinct: HashSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(Error::Validation("duplicate state name".into()));
        }
        if initial >= n {
            return Err(Error::Validation("initial state out of range".into()));
        }
        let mut fin = vec![false; n];
        for f in finals {
            if f >= n {
                return Err(Error::Validation("final state out of range".into()));
            }
            fin[f] = true;
        }
        let mut seen = HashSet::new();
        let mut outputs = Vec::with_capacity(transitions.len());
        for t in &transitions {
            if t.from >= n || t.to >= n {
                return Err(Error::Validation("transition endpoint out of range".into()));
            }
            if t.bit > 1 {
                return Err(Error::Validation(format!("input bit {} is not 0 or 1", t.bit)));
            }
            if !seen.insert((t.from, t.bit, t.to)) {
                return Err(Error::Validation(format!(
                    "duplicate transition {} {} {}",
                    names[t.from], t.bit, names[t.to]
                )));
            }
            let a = Automaton::from_regex(&t.output, alphabet.len());
            if a.is_empty() {
                return Err(Error::Validation(format!(
                    "output of {} {} {} denotes the empty language",
                    names[t.from], t.bit, names[t.to]
                )));
            }
            outputs.push(a);
        }
        Ok(Self {
            alphabet,
            names,
            initial,
            finals: fin,
            transitions,
            outputs,
            empty_input: false,
        })
    }

    pub fn alphabet(&self) -> &OrderedAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, q: usize) -> &str {
        &self.names[q]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.finals[q])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Compiled output automaton of transition `i`.
    pub fn output(&self, i: usize) -> &Automaton {
        &self.outputs[i]
    }

    /// Whether the empty input is accepted (with output ε).
    pub fn accepts_empty_input(&self) -> bool {
        self.empty_input || self.finals[self.initial]
    }

    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.transitions.len()).filter(move |&i| self.transitions[i].from == q)
    }

    /// Source/sink normalization: the initial state gets no incoming
    /// transitions, final states get no outgoing ones, and useless states
    /// are dropped. Acceptance of the empty input is kept as a flag.
    pub fn validate(&self) -> Result<Transducer> {
        let mut names = self.names.clone();
        let mut trans = self.transitions.clone();
        let mut finals: Vec<usize> = self.finals().collect();
        let empty_input = self.accepts_empty_input();
        let mut initial = self.initial;

        if trans.iter().any(|t| t.to == initial) {
            let fresh = fresh_name(&names, &format!("{}_src", names[initial]));
            names.push(fresh);
            let s = names.len() - 1;
            let copies: Vec<Transition> = trans
                .iter()
                .filter(|t| t.from == initial)
                .map(|t| Transition { from: s, ..t.clone() })
                .collect();
            trans.extend(copies);
            initial = s;
        }
        // the initial state never accepts; empty input is carried by the flag
        finals.retain(|&f| f != initial);

        let mut new_finals = Vec::new();
        for f in finals {
            if trans.iter().any(|t| t.from == f) {
                let fresh = fresh_name(&names, &format!("{}_sink", names[f]));
                names.push(fresh);
                let s = names.len() - 1;
                let copies: Vec<Transition> = trans
                    .iter()
                    .filter(|t| t.to == f)
                    .map(|t| Transition { to: s, ..t.clone() })
                    .collect();
                trans.extend(copies);
                new_finals.push(s);
            } else {
                new_finals.push(f);
            }
        }

        let mut m = Transducer::new(self.alphabet.clone(), names, initial, new_finals, trans)?;
        m.empty_input = empty_input;
        Ok(m.trimmed())
    }

    /// Drops states not on any path from the initial state to a final state.
    /// The initial state is always kept.
    pub fn trimmed(&self) -> Transducer {
        let n = self.num_states();
        let mut fwd = vec![false; n];
        fwd[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for t in &self.transitions {
                if t.from == q && !fwd[t.to] {
                    fwd[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        let mut bwd = self.finals.clone();
        let mut stack: Vec<usize> = self.finals().collect();
        while let Some(q) = stack.pop() {
            for t in &self.transitions {
                if t.to == q && !bwd[t.from] {
                    bwd[t.from] = true;
                    stack.push(t.from);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|q| q == self.initial || (fwd[q] && bwd[q])).collect();
        let mut map = vec![usize::MAX; n];
        let mut names = Vec::new();
        for q in 0..n {
            if keep[q] {
                map[q] = names.len();
                names.push(self.names[q].clone());
            }
        }
        let mut transitions = Vec::new();
        let mut outputs = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if keep[t.from] && keep[t.to] && fwd[t.from] && bwd[t.to] {
                transitions.push(Transition {
                    from: map[t.from],
                    to: map[t.to],
                    ..t.clone()
                });
                outputs.push(self.outputs[i].clone());
            }
        }
        let finals = (0..n).map(|q| keep[q] && self.finals[q] && fwd[q]);
        let finals: Vec<bool> = {
            let mut v = vec![false; names.len()];
            for (q, f) in finals.enumerate() {
                if f {
                    v[map[q]] = true;
                }
            }
            v
        };
        Transducer {
            alphabet: self.alphabet.clone(),
            names,
            initial: map[self.initial],
            finals,
            transitions,
            outputs,
            empty_input: self.empty_input,
        }
    }

    /// Same machine without transition `i`.
    pub fn without_transition(&self, i: usize) -> Transducer {
        let mut m = self.clone();
        m.transitions.remove(i);
        m.outputs.remove(i);
        m
    }

    /// `L(M, w, q0, q)` for every state `q`, by the inductive
    /// product-and-union over the prefixes of `w`.
    pub fn step_languages(&self, w: &Word) -> Result<Vec<Automaton>> {
        let k = self.alphabet.len();
        if let Some(&s) = w.symbols().iter().find(|&&s| s > 1) {
            return Err(Error::Input(format!("input symbol {s} is not a bit")));
        }
        let mut cur: Vec<Automaton> = (0..self.num_states())
            .map(|q| if q == self.initial { Automaton::epsilon(k) } else { Automaton::empty(k) })
            .collect();
        for &bit in w.symbols() {
            let mut next: Vec<Option<Automaton>> = vec![None; self.num_states()];
            for (i, t) in self.transitions.iter().enumerate() {
                if t.bit as u16 != bit || cur[t.from].is_empty() {
                    continue;
                }
                let piece = cur[t.from].concat(&self.outputs[i]);
                next[t.to] = Some(match next[t.to].take() {
                    Some(acc) => acc.union(&piece),
                    None => piece,
                });
            }
            cur = next.into_iter().map(|a| a.unwrap_or_else(|| Automaton::empty(k))).collect();
        }
        Ok(cur)
    }

    /// `L(M, w)`: union of `L(M, w, q0, f)` over final `f`.
    pub fn step_language(&self, w: &Word) -> Result<Automaton> {
        let per_state = self.step_languages(w)?;
        let mut acc = Automaton::empty(self.alphabet.len());
        if w.is_empty() && self.empty_input {
            acc = Automaton::epsilon(self.alphabet.len());
        }
        for f in self.finals() {
            acc = acc.union(&per_state[f]);
        }
        Ok(acc)
    }

    /// Output language over all input words reaching a final state, ignoring
    /// the Dyck constraint. A regular superset of `L(M)`.
    pub fn output_overapproximation(&self) -> Automaton {
        let k = self.alphabet.len();
        let mut nfa = Nfa::new(k);
        for _ in 0..self.num_states() {
            nfa.add_state();
        }
        let accept = nfa.add_state();
        for (i, t) in self.transitions.iter().enumerate() {
            nfa.splice(t.from as u32, &self.outputs[i], t.to as u32);
        }
        for f in self.finals() {
            nfa.add_eps(f as u32, accept);
        }
        if self.accepts_empty_input() {
            nfa.add_eps(self.initial as u32, accept);
        }
        nfa.add_initial(self.initial as u32);
        nfa.set_final(accept, true);
        nfa.determinize().minimized()
    }

    /// Checks that `run` follows transitions of this machine from its start.
    pub fn check_run(&self, run: &Run) -> Result<usize> {
        let mut q = run.start;
        for &i in &run.transitions {
            let t = self
                .transitions
                .get(i)
                .ok_or_else(|| Error::Precondition(format!("transition index {i} out of range")))?;
            if t.from != q {
                return Err(Error::Precondition(format!("transition {i} does not leave state {}", self.names[q])));
            }
            q = t.to;
        }
        Ok(q)
    }

    pub fn run_input(&self, run: &Run) -> Word {
        Word(run.transitions.iter().map(|&i| self.transitions[i].bit as u16).collect())
    }

    /// All accepting runs from the initial state on inputs in D1 of length
    /// at most `max_len`.
    pub fn accepting_runs(&self, max_len: usize) -> Vec<Run> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.runs_from(self.initial, 0, max_len, &mut path, &mut out);
        out
    }

    fn runs_from(&self, q: usize, depth: usize, budget: usize, path: &mut Vec<usize>, out: &mut Vec<Run>) {
        if depth == 0 && self.finals[q] {
            out.push(Run {
                start: self.initial,
                transitions: path.clone(),
            });
        }
        if budget == 0 {
            return;
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from != q {
                continue;
            }
            let ok = if t.bit == 0 { depth < budget } else { depth > 0 };
            if !ok {
                continue;
            }
            let d = if t.bit == 0 { depth + 1 } else { depth - 1 };
            path.push(i);
            self.runs_from(t.to, d, budget - 1, path, out);
            path.pop();
        }
    }

    /// States touched by some transition or being initial/final.
    pub fn used_states(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.finals().collect();
        s.insert(self.initial);
        for t in &self.transitions {
            s.insert(t.from);
            s.insert(t.to);
        }
        s
    }
}

fn fresh_name(names: &[String], base: &str) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while names.contains(&name) {
        i += 1;
        name = format!("{base}{i}");
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::parse_regex;

    pub(crate) fn fig1() -> Transducer {
        let abc = OrderedAlphabet::new("abc".chars()).unwrap();
        let re = |s: &str| parse_regex(s, &abc).unwrap();
        Transducer::new(
            abc.clone(),
            vec!["q0".into(), "qf".into()],
            0,
            [1],
            vec![
                Transition { from: 0, bit: 0, to: 0, output: re("c") },
                Transition { from: 0, bit: 1, to: 1, output: re("b*a") },
                Transition { from: 1, bit: 1, to: 1, output: re("b*a") },
            ],
        )
        .unwrap()
    }

    fn lang_eq(a: &Automaton, text: &str, alpha: &OrderedAlphabet) -> bool {
        let b = Automaton::from_regex(&parse_regex(text, alpha).unwrap(), alpha.len());
        a.symmetric_difference(&b).is_empty()
    }

    #[test]
    fn step_language_examples() {
        let m = fig1();
        let bin = OrderedAlphabet::binary();
        let l = m.step_language(&bin.word("01").unwrap()).unwrap();
        assert!(lang_eq(&l, "cb*a", m.alphabet()));
        let l = m.step_language(&bin.word("0011").unwrap()).unwrap();
        assert!(lang_eq(&l, "ccb*ab*a", m.alphabet()));
        assert!(m.step_language(&Word::empty()).unwrap().is_empty());
        assert!(m.step_language(&Word(vec![2])).is_err());
    }

    #[test]
    fn validate_normalizes_fig1() {
        let v = fig1().validate().unwrap();
        let init = v.initial();
        assert!(v.transitions().iter().all(|t| t.to != init));
        for f in v.finals() {
            assert!(v.transitions().iter().all(|t| t.from != f));
        }
        let bin = OrderedAlphabet::binary();
        for u in crate::harness::dyck_words(10) {
            let a = fig1().step_language(&u).unwrap();
            let b = v.step_language(&u).unwrap();
            assert!(a.symmetric_difference(&b).is_empty(), "{}", bin.render(&u));
        }
    }

    #[test]
    fn validate_is_identity_on_normal_machines() {
        let abc = OrderedAlphabet::new("abc".chars()).unwrap();
        let m = Transducer::new(
            abc.clone(),
            vec!["s".into(), "m".into(), "f".into()],
            0,
            [2],
            vec![
                Transition { from: 0, bit: 0, to: 1, output: Regex::Letter(0) },
                Transition { from: 1, bit: 1, to: 2, output: Regex::Letter(1) },
            ],
        )
        .unwrap();
        assert_eq!(m.validate().unwrap(), m);
    }

    #[test]
    fn validate_drops_unreachable_states() {
        let abc = OrderedAlphabet::new("abc".chars()).unwrap();
        let m = Transducer::new(
            abc,
            vec!["s".into(), "f".into(), "x".into()],
            0,
            [1],
            vec![
                Transition { from: 0, bit: 0, to: 1, output: Regex::Letter(0) },
                Transition { from: 2, bit: 1, to: 1, output: Regex::Letter(1) },
            ],
        )
        .unwrap();
        let v = m.validate().unwrap();
        assert_eq!(v.num_states(), 2);
        assert!(v.state("x").is_none());
    }

    #[test]
    fn rejects_bad_machines() {
        let abc = OrderedAlphabet::new("abc".chars()).unwrap();
        assert!(Transducer::new(abc.clone(), vec![], 0, [], vec![]).is_err());
        let r = Transducer::new(
            abc.clone(),
            vec!["s".into()],
            0,
            [0],
            vec![Transition { from: 0, bit: 0, to: 0, output: Regex::Empty }],
        );
        assert!(matches!(r, Err(Error::Validation(_))));
        let dup = Transition { from: 0, bit: 0, to: 0, output: Regex::Letter(0) };
        assert!(Transducer::new(abc, vec!["s".into()], 0, [0], vec![dup.clone(), dup]).is_err());
    }
}
