//! Nondeterministic construction automata and trimmed deterministic automata.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::words::{Symbol, Word};

use super::regex::Regex;

const NONE: u32 = u32::MAX;

/// An ε-NFA used as a construction scratchpad.
#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet_len: usize,
    eps: Vec<Vec<u32>>,
    trans: Vec<Vec<(Symbol, u32)>>,
    initial: Vec<u32>,
    finals: Vec<bool>,
}

/// Where an embedded automaton landed inside an [`Nfa`].
#[derive(Debug, Clone)]
pub struct Embedded {
    pub entry: Option<u32>,
    pub exits: Vec<u32>,
}

impl Nfa {
    pub fn new(alphabet_len: usize) -> Self {
        Self {
            alphabet_len,
            eps: Vec::new(),
            trans: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn add_state(&mut self) -> u32 {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.finals.push(false);
        (self.finals.len() - 1) as u32
    }

    pub fn add_eps(&mut self, from: u32, to: u32) {
        self.eps[from as usize].push(to);
    }

    pub fn add_trans(&mut self, from: u32, s: Symbol, to: u32) {
        self.trans[from as usize].push((s, to));
    }

    pub fn add_initial(&mut self, s: u32) {
        self.initial.push(s);
    }

    pub fn set_final(&mut self, s: u32, f: bool) {
        self.finals[s as usize] = f;
    }

    /// Copies `a` into this NFA without marking anything initial or final.
    pub fn embed(&mut self, a: &Automaton) -> Embedded {
        let base = self.num_states() as u32;
        for _ in 0..a.num_states() {
            self.add_state();
        }
        for s in 0..a.num_states() as u32 {
            for sym in 0..a.alphabet_len as Symbol {
                if let Some(t) = a.step(s, sym) {
                    self.add_trans(base + s, sym, base + t);
                }
            }
        }
        Embedded {
            entry: a.initial.map(|i| base + i),
            exits: (0..a.num_states() as u32).filter(|&s| a.is_final(s)).map(|s| base + s).collect(),
        }
    }

    /// Connects `from` to `to` through a copy of `a` (no-op if `L(a)` is empty).
    pub fn splice(&mut self, from: u32, a: &Automaton, to: u32) {
        let e = self.embed(a);
        if let Some(entry) = e.entry {
            self.add_eps(from, entry);
            for x in e.exits {
                self.add_eps(x, to);
            }
        }
    }

    /// Thompson construction; returns (start, end) of the fragment.
    fn fragment(&mut self, r: &Regex) -> (u32, u32) {
        let start = self.add_state();
        let end = self.add_state();
        match r {
            Regex::Empty => {}
            Regex::Epsilon => self.add_eps(start, end),
            Regex::Letter(s) => self.add_trans(start, *s, end),
            Regex::Union(a, b) => {
                for sub in [a, b] {
                    let (s, e) = self.fragment(sub);
                    self.add_eps(start, s);
                    self.add_eps(e, end);
                }
            }
            Regex::Concat(a, b) => {
                let (s1, e1) = self.fragment(a);
                let (s2, e2) = self.fragment(b);
                self.add_eps(start, s1);
                self.add_eps(e1, s2);
                self.add_eps(e2, end);
            }
            Regex::Star(a) => {
                let (s, e) = self.fragment(a);
                self.add_eps(start, end);
                self.add_eps(start, s);
                self.add_eps(e, s);
                self.add_eps(e, end);
            }
        }
        (start, end)
    }

    pub fn from_regex(r: &Regex, alphabet_len: usize) -> Self {
        let mut n = Nfa::new(alphabet_len);
        let (s, e) = n.fragment(r);
        n.add_initial(s);
        n.set_final(e, true);
        n
    }

    fn closure(&self, set: &mut BTreeSet<u32>) {
        let mut stack: Vec<u32> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s as usize] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    /// Subset construction followed by trimming.
    pub fn determinize(&self) -> Automaton {
        let mut start: BTreeSet<u32> = self.initial.iter().copied().collect();
        self.closure(&mut start);
        let mut index: HashMap<BTreeSet<u32>, u32> = HashMap::new();
        let mut sets: Vec<BTreeSet<u32>> = Vec::new();
        let mut delta: Vec<u32> = Vec::new();
        let mut finals = Vec::new();
        index.insert(start.clone(), 0);
        sets.push(start);
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            finals.push(cur.iter().any(|&s| self.finals[s as usize]));
            let mut by_sym: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); self.alphabet_len];
            for &s in &cur {
                for &(sym, t) in &self.trans[s as usize] {
                    by_sym[sym as usize].insert(t);
                }
            }
            for mut next in by_sym {
                if next.is_empty() {
                    delta.push(NONE);
                    continue;
                }
                self.closure(&mut next);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len() as u32;
                        index.insert(next.clone(), id);
                        sets.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        Automaton {
            alphabet_len: self.alphabet_len,
            delta,
            initial: Some(0),
            finals,
        }
        .trimmed()
    }
}

/// A trimmed deterministic automaton with a partial transition function.
///
/// Every state is reachable from the initial state and can reach a final
/// state; the empty language is the automaton with no states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet_len: usize,
    delta: Vec<u32>,
    initial: Option<u32>,
    finals: Vec<bool>,
}

impl Automaton {
    pub fn empty(alphabet_len: usize) -> Self {
        Self {
            alphabet_len,
            delta: Vec::new(),
            initial: None,
            finals: Vec::new(),
        }
    }

    pub fn epsilon(alphabet_len: usize) -> Self {
        Nfa::from_regex(&Regex::Epsilon, alphabet_len).determinize()
    }

    /// Minimal trimmed DFA for `r`.
    pub fn from_regex(r: &Regex, alphabet_len: usize) -> Self {
        Nfa::from_regex(r, alphabet_len).determinize().minimized()
    }

    pub fn from_word(w: &Word, alphabet_len: usize) -> Self {
        Self::from_regex(&Regex::word(w.symbols()), alphabet_len)
    }

    /// The cyclic automaton for `v*` (deterministic by construction).
    pub fn power_of(v: &Word, alphabet_len: usize) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Input("v* needs a nonempty v".into()));
        }
        let n = v.len();
        let mut delta = vec![NONE; n * alphabet_len];
        for (i, &s) in v.symbols().iter().enumerate() {
            delta[i * alphabet_len + s as usize] = ((i + 1) % n) as u32;
        }
        let mut finals = vec![false; n];
        finals[0] = true;
        Ok(Self {
            alphabet_len,
            delta,
            initial: Some(0),
            finals,
        })
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet_len
    }

    pub fn num_states(&self) -> usize {
        self.finals.len()
    }

    pub fn initial(&self) -> Option<u32> {
        self.initial
    }

    pub fn is_final(&self, s: u32) -> bool {
        self.finals[s as usize]
    }

    pub fn step(&self, s: u32, sym: Symbol) -> Option<u32> {
        let t = self.delta[s as usize * self.alphabet_len + sym as usize];
        (t != NONE).then_some(t)
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn successors(&self, s: u32) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        (0..self.alphabet_len as Symbol).filter_map(move |a| self.step(s, a).map(|t| (a, t)))
    }

    fn trimmed(self) -> Self {
        let Some(init) = self.initial else {
            return Self::empty(self.alphabet_len);
        };
        let n = self.num_states();
        let mut fwd = vec![false; n];
        let mut stack = vec![init];
        fwd[init as usize] = true;
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        while let Some(s) = stack.pop() {
            for (_, t) in self.successors(s) {
                rev[t as usize].push(s);
                if !fwd[t as usize] {
                    fwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut bwd = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| fwd[s as usize] && self.finals[s as usize]).collect();
        for &s in &stack {
            bwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !bwd[p as usize] {
                    bwd[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        if !bwd[init as usize] {
            return Self::empty(self.alphabet_len);
        }
        // renumber in BFS order from the initial state for canonical output
        let mut map = vec![NONE; n];
        let mut order = vec![init];
        map[init as usize] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for (_, t) in self.successors(s) {
                if bwd[t as usize] && map[t as usize] == NONE {
                    map[t as usize] = order.len() as u32;
                    order.push(t);
                }
            }
            i += 1;
        }
        let k = self.alphabet_len;
        let mut delta = vec![NONE; order.len() * k];
        let mut finals = vec![false; order.len()];
        for (new, &old) in order.iter().enumerate() {
            finals[new] = self.finals[old as usize];
            for (a, t) in self.successors(old) {
                if map[t as usize] != NONE {
                    delta[new * k + a as usize] = map[t as usize];
                }
            }
        }
        Self {
            alphabet_len: k,
            delta,
            initial: Some(0),
            finals,
        }
    }

    /// Moore partition refinement; a missing transition acts as a dead sink.
    pub fn minimized(&self) -> Self {
        let n = self.num_states();
        if n == 0 {
            return self.clone();
        }
        let k = self.alphabet_len;
        let mut class: Vec<u32> = self.finals.iter().map(|&f| f as u32).collect();
        let mut count = 0;
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = Vec::with_capacity(n);
            for s in 0..n {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[s]);
                for a in 0..k {
                    let t = self.delta[s * k + a];
                    sig.push(if t == NONE { NONE } else { class[t as usize] });
                }
                let fresh = ids.len() as u32;
                next.push(*ids.entry(sig).or_insert(fresh));
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut delta = vec![NONE; count * k];
        let mut finals = vec![false; count];
        for s in 0..n {
            let c = class[s] as usize;
            finals[c] = self.finals[s];
            for a in 0..k {
                let t = self.delta[s * k + a];
                if t != NONE {
                    delta[c * k + a] = class[t as usize];
                }
            }
        }
        Self {
            alphabet_len: k,
            delta,
            initial: self.initial.map(|i| class[i as usize]),
            finals,
        }
        .trimmed()
    }

    pub fn accepts(&self, w: &Word) -> Result<bool> {
        if let Some(s) = w.symbols().iter().find(|&&s| s as usize >= self.alphabet_len) {
            return Err(Error::Input(format!("symbol index {s} is outside the automaton alphabet")));
        }
        let Some(mut cur) = self.initial else { return Ok(false) };
        for &s in w.symbols() {
            match self.step(cur, s) {
                Some(t) => cur = t,
                None => return Ok(false),
            }
        }
        Ok(self.is_final(cur))
    }

    /// BFS from `start` visiting letters in increasing order; the first final
    /// state discovered carries a length-lexicographically minimal word.
    fn shortest_from(&self, start: u32, allow_empty: bool) -> Option<Word> {
        if allow_empty && self.is_final(start) {
            return Some(Word::empty());
        }
        let n = self.num_states();
        let mut parent: Vec<Option<(u32, Symbol)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        // the start state is re-discoverable when the empty word is excluded
        let root = n as u32;
        let mut q_parent: HashMap<u32, (u32, Symbol)> = HashMap::new();
        queue.push_back(root);
        while let Some(s) = queue.pop_front() {
            let from = if s == root { start } else { s };
            for (a, t) in self.successors(from) {
                if seen[t as usize] {
                    continue;
                }
                seen[t as usize] = true;
                if s == root {
                    q_parent.insert(t, (root, a));
                } else {
                    parent[t as usize] = Some((s, a));
                }
                if self.is_final(t) {
                    let mut word = Vec::new();
                    let mut cur = t;
                    loop {
                        let (p, a) = match parent[cur as usize] {
                            Some(pa) => pa,
                            None => q_parent[&cur],
                        };
                        word.push(a);
                        if p == root {
                            break;
                        }
                        cur = p;
                    }
                    word.reverse();
                    return Some(Word(word));
                }
                queue.push_back(t);
            }
        }
        None
    }

    /// Length-lexicographically minimal accepted word.
    pub fn shortest_word(&self) -> Option<Word> {
        self.shortest_from(self.initial?, true)
    }

    pub fn shortest_nonempty_word(&self) -> Option<Word> {
        self.shortest_from(self.initial?, false)
    }

    /// Product automaton; `keep(in_self, in_other)` decides acceptance, with a
    /// missing transition on either side treated as a rejecting sink.
    fn product(&self, other: &Automaton, keep: impl Fn(bool, bool) -> bool) -> Automaton {
        assert_eq!(self.alphabet_len, other.alphabet_len, "alphabet mismatch");
        let k = self.alphabet_len;
        let (a0, b0) = (self.initial.unwrap_or(NONE), other.initial.unwrap_or(NONE));
        if a0 == NONE && b0 == NONE {
            return Automaton::empty(k);
        }
        let mut index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(a0, b0)];
        index.insert((a0, b0), 0);
        let mut delta = Vec::new();
        let mut finals = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            let fa = a != NONE && self.is_final(a);
            let fb = b != NONE && other.is_final(b);
            finals.push(keep(fa, fb));
            for sym in 0..k as Symbol {
                let na = if a == NONE { NONE } else { self.step(a, sym).unwrap_or(NONE) };
                let nb = if b == NONE { NONE } else { other.step(b, sym).unwrap_or(NONE) };
                if na == NONE && nb == NONE {
                    delta.push(NONE);
                    continue;
                }
                let id = *index.entry((na, nb)).or_insert_with(|| {
                    pairs.push((na, nb));
                    (pairs.len() - 1) as u32
                });
                delta.push(id);
            }
            i += 1;
        }
        Automaton {
            alphabet_len: k,
            delta,
            initial: Some(0),
            finals,
        }
        .trimmed()
    }

    pub fn intersect(&self, other: &Automaton) -> Automaton {
        self.product(other, |a, b| a && b)
    }

    /// `L(self) \ L(other)`.
    pub fn difference(&self, other: &Automaton) -> Automaton {
        self.product(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Automaton) -> Automaton {
        self.product(other, |a, b| a != b)
    }

    pub fn union(&self, other: &Automaton) -> Automaton {
        self.product(other, |a, b| a || b)
    }

    pub fn is_subset_of(&self, other: &Automaton) -> bool {
        self.difference(other).is_empty()
    }

    pub fn concat(&self, other: &Automaton) -> Automaton {
        let mut n = Nfa::new(self.alphabet_len);
        let s = n.add_state();
        let m = n.add_state();
        let e = n.add_state();
        n.splice(s, self, m);
        n.splice(m, other, e);
        n.add_initial(s);
        n.set_final(e, true);
        n.determinize()
    }

    /// `L⁺`.
    pub fn plus(&self) -> Automaton {
        let mut n = Nfa::new(self.alphabet_len);
        let s = n.add_state();
        let e = n.add_state();
        n.splice(s, self, e);
        n.add_eps(e, s);
        n.add_initial(s);
        n.set_final(e, true);
        n.determinize()
    }

    /// Nonempty words leading from `state` back to itself.
    pub fn cycle_language(&self, state: u32) -> Automaton {
        let mut n = Nfa::new(self.alphabet_len);
        let base = n.num_states() as u32;
        for _ in 0..self.num_states() {
            n.add_state();
        }
        for s in 0..self.num_states() as u32 {
            for (a, t) in self.successors(s) {
                n.add_trans(base + s, a, base + t);
            }
        }
        let start = n.add_state();
        for (a, t) in self.successors(state) {
            n.add_trans(start, a, base + t);
        }
        n.add_initial(start);
        n.set_final(base + state, true);
        n.determinize()
    }

    /// Successor lists, for graph algorithms.
    pub fn graph(&self) -> Vec<Vec<u32>> {
        (0..self.num_states() as u32)
            .map(|s| self.successors(s).map(|(_, t)| t).collect())
            .collect()
    }

    /// Length of the longest accepted word, or `None` if the language is infinite.
    pub fn max_word_len(&self) -> Option<usize> {
        if self.is_empty() {
            return Some(0);
        }
        // trimmed: infinite iff the graph has a cycle
        let n = self.num_states();
        let graph = self.graph();
        let mut indeg = vec![0usize; n];
        for succ in &graph {
            for &t in succ {
                indeg[t as usize] += 1;
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut stack: Vec<u32> = (0..n as u32).filter(|&s| indeg[s as usize] == 0).collect();
        while let Some(s) = stack.pop() {
            order.push(s);
            for &t in &graph[s as usize] {
                indeg[t as usize] -= 1;
                if indeg[t as usize] == 0 {
                    stack.push(t);
                }
            }
        }
        if order.len() < n {
            return None;
        }
        let mut longest = vec![0usize; n];
        for &s in &order {
            for &t in &graph[s as usize] {
                longest[t as usize] = longest[t as usize].max(longest[s as usize] + 1);
            }
        }
        Some(
            (0..n)
                .filter(|&s| self.finals[s])
                .map(|s| longest[s])
                .max()
                .unwrap_or(0),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.max_word_len().is_some()
    }

    /// All accepted words of length at most `max_len`, in `<_ℓ` order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if let Some(init) = self.initial {
            let mut buf = Vec::new();
            self.collect_words(init, max_len, &mut buf, &mut out);
        }
        out
    }

    fn collect_words(&self, s: u32, budget: usize, buf: &mut Vec<Symbol>, out: &mut Vec<Word>) {
        if self.is_final(s) {
            out.push(Word(buf.clone()));
        }
        if budget == 0 {
            return;
        }
        for (a, t) in self.successors(s) {
            buf.push(a);
            self.collect_words(t, budget - 1, buf, out);
            buf.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::parse_regex;
    use crate::words::OrderedAlphabet;

    fn compile(text: &str, alpha: &OrderedAlphabet) -> Automaton {
        Automaton::from_regex(&parse_regex(text, alpha).unwrap(), alpha.len())
    }

    #[test]
    fn trimmed_and_canonical() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let a = compile("(a+b)*a", &ab);
        let b = compile("(b*a)(b*a)*", &ab);
        assert!(a.symmetric_difference(&b).is_empty());
        assert!(compile("a(b+eps)", &ab).intersect(&compile("b", &ab)).is_empty());
        assert_eq!(Automaton::empty(2).num_states(), 0);
    }

    #[test]
    fn words_in_lex_order() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let ws: Vec<String> = compile("b*a", &ab).words_up_to(3).iter().map(|w| ab.render(w)).collect();
        assert_eq!(ws, ["a", "ba", "bba"]);
        let ws: Vec<String> = compile("(a+b)(a+b)+a", &ab).words_up_to(2).iter().map(|w| ab.render(w)).collect();
        assert_eq!(ws, ["a", "aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn finiteness() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        assert_eq!(compile("ab+a", &ab).max_word_len(), Some(2));
        assert_eq!(compile("a*", &ab).max_word_len(), None);
        assert_eq!(compile("eps", &ab).max_word_len(), Some(0));
    }

    #[test]
    fn concat_and_plus() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let c = compile("a", &ab).concat(&compile("b*", &ab));
        assert!(c.symmetric_difference(&compile("ab*", &ab)).is_empty());
        let p = compile("ab+b", &ab).plus();
        assert!(p.symmetric_difference(&compile("(ab+b)(ab+b)*", &ab)).is_empty());
    }

    #[test]
    fn cycle_language_of_a_loop_state() {
        let ab = OrderedAlphabet::new("ab".chars()).unwrap();
        let a = compile("a*b", &ab);
        let init = a.initial().unwrap();
        let cyc = a.cycle_language(init);
        assert!(cyc.symmetric_difference(&compile("aa*", &ab)).is_empty());
    }
}
