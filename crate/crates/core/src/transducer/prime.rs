use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::counterset::NSetReport;
use crate::error::{Error, Result};
use crate::regular::{Automaton, Nfa};
use crate::words::{is_dyck, Word};

use super::{Run, Transducer};

/// Depth phase of a typed state: below `P` before, inside, or after the
/// deep zone of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Up,
    Eq,
    Down,
}

impl Phase {
    pub fn tag(self) -> &'static str {
        match self {
            Phase::Up => "up",
            Phase::Eq => "eq",
            Phase::Down => "down",
        }
    }

    pub fn arrow(self) -> &'static str {
        match self {
            Phase::Up => "↑",
            Phase::Eq => "≡",
            Phase::Down => "↓",
        }
    }
}

/// `(q, n, σ)`: exact depth `n < P` for up/down, `n ∈ [P, 2P)` mod `P` for eq.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypedState {
    pub q: usize,
    pub n: u64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Rule {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::I => "i",
            Rule::II => "ii",
            Rule::III => "iii",
            Rule::IV => "iv",
        })
    }
}

impl Rule {
    /// Every rule whose side conditions `((p,n,σ1), a, (q,m,σ2))` meets.
    /// Rule ii is read for up/down sources only; the eq exit `P → P-1` is rule iv.
    pub fn matching(period: u64, from: TypedState, bit: u8, to: TypedState) -> Vec<Rule> {
        let p = period;
        let (n, m, s1, s2) = (from.n, to.n, from.phase, to.phase);
        let mut out = Vec::new();
        if bit == 0 && n + 1 == m && m < p && s1 == s2 {
            out.push(Rule::I);
        }
        if bit == 1 && n >= 1 && n - 1 == m && m < p && s1 != Phase::Eq && (s2 == s1 || s2 == Phase::Down) {
            out.push(Rule::II);
        }
        if bit == 0 && (n + 1) % p == m % p && m >= p && n + 1 >= p && s2 == Phase::Eq && s1 != Phase::Down {
            out.push(Rule::III);
        }
        if bit == 1 && (n + p - 1) % p == m % p && n >= p && m + 1 >= p && s1 == Phase::Eq && s2 != Phase::Up {
            out.push(Rule::IV);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTransition {
    pub from: usize,
    pub bit: u8,
    pub to: usize,
    pub rule: Rule,
    /// Index of the transition of `M` this one copies.
    pub origin: usize,
}

/// The depth-typed machine `M′`. Outputs are inherited from the base machine.
#[derive(Debug, Clone)]
pub struct TransducerPrime {
    base: Transducer,
    states: Vec<TypedState>,
    index: HashMap<TypedState, usize>,
    initial: Option<usize>,
    finals: Vec<bool>,
    transitions: Vec<PrimeTransition>,
    period: u64,
}

impl TransducerPrime {
    pub fn base(&self) -> &Transducer {
        &self.base
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn states(&self) -> &[TypedState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// `None` when the base machine accepts no nonempty input.
    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    pub fn is_final(&self, s: usize) -> bool {
        self.finals[s]
    }

    pub fn finals(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.len()).filter(|&s| self.finals[s])
    }

    pub fn transitions(&self) -> &[PrimeTransition] {
        &self.transitions
    }

    pub fn output(&self, i: usize) -> &Automaton {
        self.base.output(self.transitions[i].origin)
    }

    pub fn find(&self, s: &TypedState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn accepts_empty_input(&self) -> bool {
        self.base.accepts_empty_input()
    }

    pub fn label(&self, s: usize) -> String {
        let t = self.states[s];
        format!("({},{},{})", self.base.name(t.q), t.n, t.phase.arrow())
    }

    /// Successor lists over state indices.
    pub fn graph(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            g[t.from].push(t.to);
        }
        g
    }

    /// A copy with transition `i` removed (states untouched).
    pub fn without_transition(&self, i: usize) -> TransducerPrime {
        let mut m = self.clone();
        m.transitions.remove(i);
        m
    }

    fn check_run(&self, run: &Run) -> Result<usize> {
        let mut s = run.start;
        for &i in &run.transitions {
            let t = self
                .transitions
                .get(i)
                .ok_or_else(|| Error::Precondition(format!("transition index {i} out of range")))?;
            if t.from != s {
                return Err(Error::Precondition(format!("transition {i} does not leave {}", self.label(s))));
            }
            s = t.to;
        }
        Ok(s)
    }

    pub fn is_accepting_run(&self, run: &Run) -> bool {
        match self.check_run(run) {
            Ok(end) => {
                Some(run.start) == self.initial && (self.finals[end] || (run.transitions.is_empty() && self.accepts_empty_input()))
            }
            Err(_) => false,
        }
    }
}

fn in_type(report: &NSetReport, s: TypedState) -> bool {
    let p = report.period;
    let zone = match s.phase {
        Phase::Up | Phase::Down => s.n < p,
        Phase::Eq => p <= s.n && s.n < 2 * p,
    };
    zone && report.types[s.q].contains(&s.n)
}

/// Targets of one transition of `M` from a typed state, tagged by rule.
fn targets(p: u64, from: TypedState, bit: u8, q: usize) -> Vec<(TypedState, Rule)> {
    let n = from.n;
    let mut out = Vec::new();
    let st = |n, phase| TypedState { q, n, phase };
    match (bit, from.phase) {
        (0, Phase::Up | Phase::Down) => {
            if n + 1 < p {
                out.push((st(n + 1, from.phase), Rule::I));
            }
            if from.phase == Phase::Up && n + 1 == p {
                out.push((st(p, Phase::Eq), Rule::III));
            }
        }
        (0, Phase::Eq) => out.push((st(p + (n + 1) % p, Phase::Eq), Rule::III)),
        (_, Phase::Up | Phase::Down) => {
            if n >= 1 {
                out.push((st(n - 1, from.phase), Rule::II));
                if from.phase == Phase::Up {
                    out.push((st(n - 1, Phase::Down), Rule::II));
                }
            }
        }
        (_, Phase::Eq) => {
            out.push((st(p + (n + p - 1) % p, Phase::Eq), Rule::IV));
            if n == p {
                out.push((st(p - 1, Phase::Down), Rule::IV));
            }
        }
    }
    out
}

/// Builds `M′` from `M` and its counter-set report, keeping only states that
/// are accessible and co-accessible.
pub fn build_mprime(m: &Transducer, report: &NSetReport) -> Result<TransducerPrime> {
    if report.types.len() != m.num_states() {
        return Err(Error::Precondition("report does not belong to this machine".into()));
    }
    let p = report.period;
    let q0 = m.initial();
    let empty = TransducerPrime {
        base: m.clone(),
        states: Vec::new(),
        index: HashMap::new(),
        initial: None,
        finals: Vec::new(),
        transitions: Vec::new(),
        period: p,
    };
    if report.types[q0].is_empty() {
        return Ok(empty);
    }
    if !report.types[q0].contains(&0) {
        return Err(Error::Inconsistency("0 is not in the type of the initial state".into()));
    }
    let start = TypedState { q: q0, n: 0, phase: Phase::Up };
    let mut states = vec![start];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(si) = queue.pop_front() {
        let s = states[si];
        for ti in m.outgoing(s.q) {
            let t = &m.transitions()[ti];
            for (target, rule) in targets(p, s, t.bit, t.to) {
                if !in_type(report, target) {
                    continue;
                }
                let to = *index.entry(target).or_insert_with(|| {
                    states.push(target);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                transitions.push(PrimeTransition {
                    from: si,
                    bit: t.bit,
                    to,
                    rule,
                    origin: ti,
                });
            }
        }
    }
    let is_final = |s: &TypedState| s.n == 0 && s.phase == Phase::Down && m.is_final(s.q);

    // co-accessibility
    let mut live: Vec<bool> = states.iter().map(is_final).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for t in &transitions {
            if live[t.to] && !live[t.from] {
                live[t.from] = true;
                changed = true;
            }
        }
    }
    live[0] |= m.accepts_empty_input();
    if !live[0] {
        return Ok(empty);
    }
    let mut map = vec![usize::MAX; states.len()];
    let mut kept = Vec::new();
    for (i, s) in states.iter().enumerate() {
        if live[i] {
            map[i] = kept.len();
            kept.push(*s);
        }
    }
    let transitions: Vec<PrimeTransition> = transitions
        .into_iter()
        .filter(|t| live[t.from] && live[t.to])
        .map(|t| PrimeTransition {
            from: map[t.from],
            to: map[t.to],
            ..t
        })
        .collect();
    let finals = kept.iter().map(is_final).collect();
    let index = kept.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    Ok(TransducerPrime {
        base: m.clone(),
        states: kept,
        index,
        initial: Some(0),
        finals,
        transitions,
        period: p,
    })
}

/// Lifts an accepting run of `M` on a Dyck input to the consistent run of `M′`.
pub fn lift_run(mp: &TransducerPrime, run: &Run) -> Result<Run> {
    let m = mp.base();
    if run.start != m.initial() {
        return Err(Error::Precondition("run does not start at the initial state".into()));
    }
    let end = m.check_run(run)?;
    let u = m.run_input(run);
    if !is_dyck(u.symbols()) {
        return Err(Error::Precondition("run input is not well bracketed".into()));
    }
    if !m.is_final(end) && !(run.transitions.is_empty() && m.accepts_empty_input()) {
        return Err(Error::Precondition("run is not accepting".into()));
    }
    let init = mp
        .initial()
        .ok_or_else(|| Error::Inconsistency("accepting run exists but M′ is empty".into()))?;
    if run.transitions.is_empty() {
        return Ok(Run {
            start: init,
            transitions: Vec::new(),
        });
    }
    let p = mp.period();
    let n = u.len();
    let mut opens = vec![0u64; n + 1];
    for (i, &b) in u.symbols().iter().enumerate() {
        opens[i + 1] = if b == 0 { opens[i] + 1 } else { opens[i] - 1 };
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut q = m.initial();
    let qs: Vec<usize> = std::iter::once(q)
        .chain(run.transitions.iter().map(|&i| {
            q = m.transitions()[i].to;
            q
        }))
        .collect();
    if opens.iter().all(|&o| o < p) {
        for i in 0..=n {
            let phase = if i < n { Phase::Up } else { Phase::Down };
            states.push(TypedState { q: qs[i], n: opens[i], phase });
        }
    } else {
        let i_up = (0..=n).take_while(|&i| opens[i] < p).last().unwrap_or(0);
        let i_down = (0..=n).rev().take_while(|&i| opens[i] < p).last().unwrap_or(n);
        for i in 0..=n {
            let (t, phase) = if i <= i_up {
                (opens[i], Phase::Up)
            } else if i >= i_down {
                (opens[i], Phase::Down)
            } else {
                (opens[i] % p + p, Phase::Eq)
            };
            states.push(TypedState { q: qs[i], n: t, phase });
        }
    }
    let idx: Vec<usize> = states
        .iter()
        .map(|s| {
            mp.find(s)
                .ok_or_else(|| Error::Inconsistency(format!("lifted state {s:?} is missing from M′")))
        })
        .collect::<Result<_>>()?;
    if idx[0] != init {
        return Err(Error::Inconsistency("lifted run does not start at the initial state".into()));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let origin = run.transitions[i];
        let ti = mp
            .transitions()
            .iter()
            .position(|t| t.from == idx[i] && t.to == idx[i + 1] && t.origin == origin)
            .ok_or_else(|| Error::Inconsistency(format!("lifted step {i} has no transition in M′")))?;
        out.push(ti);
    }
    Ok(Run {
        start: init,
        transitions: out,
    })
}

/// Maps a run of `M′` to `M` by forgetting depth and phase.
pub fn project_run(mp: &TransducerPrime, run: &Run) -> Run {
    Run {
        start: mp.states()[run.start].q,
        transitions: run.transitions.iter().map(|&i| mp.transitions()[i].origin).collect(),
    }
}

/// Result of a bounded language comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equivalence {
    pub equal: bool,
    /// Length-lexicographically least word in exactly one language.
    pub counterexample: Option<Word>,
    /// The languages differ only in words longer than the output cap.
    pub truncated: bool,
}

struct Edge<'a> {
    from: usize,
    bit: u8,
    to: usize,
    output: &'a Automaton,
}

/// Output language of all accepting runs over Dyck inputs of length ≤ `nmax`.
fn bounded_outputs(
    k: usize,
    initial: Option<usize>,
    is_final: &dyn Fn(usize) -> bool,
    edges: &[Edge<'_>],
    empty_input: bool,
    nmax: usize,
) -> Automaton {
    let Some(init) = initial else {
        return if empty_input { Automaton::epsilon(k) } else { Automaton::empty(k) };
    };
    let mut nfa = Nfa::new(k);
    let accept = nfa.add_state();
    let mut ids: HashMap<(usize, usize, usize), u32> = HashMap::new();
    let start = nfa.add_state();
    ids.insert((init, 0, 0), start);
    nfa.add_initial(start);
    if empty_input {
        nfa.add_eps(start, accept);
    }
    let mut out_edges: HashMap<usize, Vec<&Edge<'_>>> = HashMap::new();
    for e in edges {
        out_edges.entry(e.from).or_default().push(e);
    }
    let mut queue = VecDeque::from([(init, 0usize, 0usize)]);
    while let Some((s, d, l)) = queue.pop_front() {
        let id = ids[&(s, d, l)];
        if d == 0 && l > 0 && is_final(s) {
            nfa.add_eps(id, accept);
        }
        if l == nmax {
            continue;
        }
        for e in out_edges.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
            let nd = if e.bit == 0 {
                if d + 1 > nmax - l - 1 {
                    continue;
                }
                d + 1
            } else {
                if d == 0 {
                    continue;
                }
                d - 1
            };
            let key = (e.to, nd, l + 1);
            let target = match ids.get(&key) {
                Some(&t) => t,
                None => {
                    let t = nfa.add_state();
                    ids.insert(key, t);
                    queue.push_back(key);
                    t
                }
            };
            nfa.splice(id, e.output, target);
        }
    }
    nfa.set_final(accept, true);
    nfa.determinize()
}

/// Compares `⋃_{u ∈ D1, |u| ≤ nmax} L(M, u)` with the same union for `M′`,
/// reporting a counterexample of length at most `output_cap`.
pub fn bounded_language_equal(m: &Transducer, mp: &TransducerPrime, nmax: usize, output_cap: usize) -> Equivalence {
    let k = m.alphabet().len();
    let edges_m: Vec<Edge<'_>> = m
        .transitions()
        .iter()
        .enumerate()
        .map(|(i, t)| Edge {
            from: t.from,
            bit: t.bit,
            to: t.to,
            output: m.output(i),
        })
        .collect();
    let lm = bounded_outputs(
        k,
        Some(m.initial()),
        &|q| m.is_final(q),
        &edges_m,
        m.accepts_empty_input(),
        nmax,
    );
    let edges_p: Vec<Edge<'_>> = mp
        .transitions()
        .iter()
        .enumerate()
        .map(|(i, t)| Edge {
            from: t.from,
            bit: t.bit,
            to: t.to,
            output: mp.output(i),
        })
        .collect();
    let lp = bounded_outputs(k, mp.initial(), &|s| mp.is_final(s), &edges_p, mp.accepts_empty_input(), nmax);
    match lm.symmetric_difference(&lp).shortest_word() {
        None => Equivalence {
            equal: true,
            counterexample: None,
            truncated: false,
        },
        Some(w) if w.len() <= output_cap => Equivalence {
            equal: false,
            counterexample: Some(w),
            truncated: false,
        },
        Some(_) => Equivalence {
            equal: true,
            counterexample: None,
            truncated: true,
        },
    }
}
