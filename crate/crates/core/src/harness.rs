//! Brute-force oracles: bounded enumeration of languages, exhaustive
//! counter-set slices, density probing, and random machines.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::Rng;

use crate::error::Result;
use crate::rank::{distinct_root_pair, expr_rank_bound, RankVerdict, RocExpr, SearchCaps};
use crate::regular::Regex;
use crate::transducer::{Transducer, Transition};
use crate::words::{OrderedAlphabet, Word};

/// All words of D1 up to `max_len`, built from `S → 0S1S | ε`.
pub fn dyck_words(max_len: usize) -> Vec<Word> {
    let mut by_len: Vec<Vec<Vec<u16>>> = vec![vec![vec![]]];
    for n in 1..=max_len / 2 {
        let mut words = Vec::new();
        for i in 0..n {
            for inner in &by_len[i] {
                for rest in &by_len[n - 1 - i] {
                    let mut w = Vec::with_capacity(2 * n);
                    w.push(0);
                    w.extend(inner);
                    w.push(1);
                    w.extend(rest);
                    words.push(w);
                }
            }
        }
        by_len.push(words);
    }
    by_len.into_iter().flatten().map(Word).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationResult {
    /// Strictly increasing under the lexicographic order.
    pub words: Vec<Word>,
    pub input_cap: usize,
    pub output_cap: usize,
    /// Some output had members beyond the output cap.
    pub truncated: bool,
}

/// Members of `⋃_{u ∈ D1, |u| ≤ input_cap} L(M, u)` of length ≤ `output_cap`.
///
/// Walks the prefix tree of D1 words, carrying the set of (state, output)
/// pairs reached so far.
pub fn enumerate(m: &Transducer, input_cap: usize, output_cap: usize) -> EnumerationResult {
    let mut found = BTreeSet::new();
    let mut truncated = false;
    if m.accepts_empty_input() {
        found.insert(Word::empty());
    }
    let pieces: Vec<(Vec<Word>, bool)> = (0..m.transitions().len())
        .map(|i| {
            let a = m.output(i);
            let cut = a.max_word_len().is_none_or(|l| l > output_cap);
            (a.words_up_to(output_cap), cut)
        })
        .collect();
    let start: HashSet<(usize, Vec<u16>)> = HashSet::from([(m.initial(), Vec::new())]);
    let mut ctx = EnumCtx {
        m,
        pieces: &pieces,
        input_cap,
        output_cap,
        found: &mut found,
        truncated: &mut truncated,
    };
    ctx.walk(&start, 0, 0);
    EnumerationResult {
        words: found.into_iter().collect(),
        input_cap,
        output_cap,
        truncated,
    }
}

struct EnumCtx<'a> {
    m: &'a Transducer,
    pieces: &'a [(Vec<Word>, bool)],
    input_cap: usize,
    output_cap: usize,
    found: &'a mut BTreeSet<Word>,
    truncated: &'a mut bool,
}

impl EnumCtx<'_> {
    fn walk(&mut self, cur: &HashSet<(usize, Vec<u16>)>, depth: usize, len: usize) {
        if cur.is_empty() {
            return;
        }
        if depth == 0 && len > 0 {
            for (q, w) in cur {
                if self.m.is_final(*q) {
                    self.found.insert(Word(w.clone()));
                }
            }
        }
        if len == self.input_cap {
            return;
        }
        for bit in [0u8, 1] {
            let nd = match bit {
                0 if depth < self.input_cap - len - 1 => depth + 1,
                1 if depth > 0 => depth - 1,
                _ => continue,
            };
            let mut next = HashSet::new();
            for (q, w) in cur {
                for i in self.m.outgoing(*q) {
                    let t = &self.m.transitions()[i];
                    if t.bit != bit {
                        continue;
                    }
                    let (words, cut) = &self.pieces[i];
                    for x in words {
                        if w.len() + x.len() > self.output_cap {
                            *self.truncated = true;
                            continue;
                        }
                        let mut y = w.clone();
                        y.extend_from_slice(x.symbols());
                        next.insert((t.to, y));
                    }
                    if *cut {
                        *self.truncated = true;
                    }
                }
            }
            self.walk(&next, nd, len + 1);
        }
    }
}

/// Bounded enumeration of an expression's language.
pub fn enumerate_expr(e: &RocExpr, input_cap: usize, output_cap: usize) -> Result<EnumerationResult> {
    let (words, truncated) = expr_words(e, input_cap, output_cap)?;
    Ok(EnumerationResult {
        words: words.into_iter().collect(),
        input_cap,
        output_cap,
        truncated,
    })
}

fn expr_words(e: &RocExpr, ic: usize, oc: usize) -> Result<(BTreeSet<Word>, bool)> {
    Ok(match e {
        RocExpr::Atom(m) => {
            let r = enumerate(m, ic, oc);
            (r.words.into_iter().collect(), r.truncated)
        }
        RocExpr::Concat(a, b) => {
            let (x, tx) = expr_words(a, ic, oc)?;
            let (y, ty) = expr_words(b, ic, oc)?;
            let mut out = BTreeSet::new();
            let mut cut = tx || ty;
            for u in &x {
                for v in &y {
                    if u.len() + v.len() <= oc {
                        out.insert(u.concat(v));
                    } else {
                        cut = true;
                    }
                }
            }
            (out, cut)
        }
        RocExpr::Plus(a) => {
            let (base, mut cut) = expr_words(a, ic, oc)?;
            let mut all = base.clone();
            let mut frontier: Vec<Word> = base.iter().cloned().collect();
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for u in &frontier {
                    for v in &base {
                        if u.len() + v.len() > oc {
                            cut = true;
                            continue;
                        }
                        let w = u.concat(v);
                        if all.insert(w.clone()) {
                            next.push(w);
                        }
                    }
                }
                frontier = next;
            }
            (all, cut)
        }
    })
}

/// A pair of members with distinct primitive roots and the dense family
/// they generate in the iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWitness {
    pub u: Word,
    pub v: Word,
    pub family: String,
}

/// Searches for iterable distinct-root blocks: any two members under a
/// plus, certified component cycle outputs for atoms.
pub fn probe_density(e: &RocExpr, caps: SearchCaps) -> Result<Option<DensityWitness>> {
    let alphabet = e.alphabet().clone();
    let make = |u: Word, v: Word| {
        let w = crate::rank::Witness {
            x: u.clone(),
            y: v.clone(),
            context: String::new(),
        };
        DensityWitness {
            family: w.family(&alphabet),
            u,
            v,
        }
    };
    match e {
        RocExpr::Plus(inner) => {
            let members = enumerate_expr(inner, caps.input_cap, caps.output_cap)?;
            Ok(distinct_root_pair(&members.words).map(|(u, v)| make(u, v)))
        }
        RocExpr::Atom(_) => Ok(match expr_rank_bound(e, caps)? {
            RankVerdict::NotScattered(w) => Some(make(w.x, w.y)),
            _ => None,
        }),
        RocExpr::Concat(a, b) => match probe_density(a, caps)? {
            Some(w) => Ok(Some(w)),
            None => probe_density(b, caps),
        },
    }
}

/// Exact slices of `N₋`, `N₊` and `N` on `[0, counter_bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSlices {
    pub minus: Vec<BTreeSet<u64>>,
    pub plus: Vec<BTreeSet<u64>>,
    pub both: Vec<BTreeSet<u64>>,
}

/// Plain configuration search with exploration height `bound + |Q|² + |Q|`.
pub fn upset_oracle(m: &Transducer, counter_bound: u64) -> OracleSlices {
    let k = m.num_states() as u64;
    let h = counter_bound + k * k + k;
    let fwd = bfs(m, vec![(m.initial(), 0)], h, false);
    let bwd = bfs(m, m.finals().map(|f| (f, 0)).collect(), h, true);
    let slice = |r: &HashSet<(usize, u64)>, q: usize| -> BTreeSet<u64> {
        (0..=counter_bound).filter(|&c| r.contains(&(q, c))).collect()
    };
    let minus: Vec<_> = (0..m.num_states()).map(|q| slice(&fwd, q)).collect();
    let mut plus: Vec<_> = (0..m.num_states()).map(|q| slice(&bwd, q)).collect();
    if m.accepts_empty_input() {
        plus[m.initial()].insert(0);
    }
    let both = minus.iter().zip(&plus).map(|(a, b)| a.intersection(b).copied().collect()).collect();
    OracleSlices { minus, plus, both }
}

fn bfs(m: &Transducer, start: Vec<(usize, u64)>, h: u64, backward: bool) -> HashSet<(usize, u64)> {
    let mut seen: HashSet<(usize, u64)> = start.iter().copied().collect();
    let mut queue: VecDeque<(usize, u64)> = start.into();
    while let Some((q, c)) = queue.pop_front() {
        for t in m.transitions() {
            let (src, dst) = if backward { (t.to, t.from) } else { (t.from, t.to) };
            if src != q {
                continue;
            }
            let up = (t.bit == 0) != backward;
            let n = if up {
                c + 1
            } else if c > 0 {
                c - 1
            } else {
                continue;
            };
            if n <= h && seen.insert((dst, n)) {
                queue.push_back((dst, n));
            }
        }
    }
    seen
}

/// Random machine over `{a, b}` with at most `max_states` states and
/// `max_transitions` transitions. Outputs are short words, unions and stars.
pub fn random_transducer(rng: &mut impl Rng, max_states: usize, max_transitions: usize) -> Transducer {
    let alphabet = OrderedAlphabet::new("ab".chars()).expect("valid alphabet");
    let n = rng.gen_range(1..=max_states);
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut seen = HashSet::new();
    let mut trans = Vec::new();
    let count = rng.gen_range(1..=max_transitions);
    for _ in 0..count {
        let (from, bit, to) = (rng.gen_range(0..n), rng.gen_range(0..2u8), rng.gen_range(0..n));
        if seen.insert((from, bit, to)) {
            trans.push(Transition {
                from,
                bit,
                to,
                output: random_output(rng),
            });
        }
    }
    let finals: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    let finals = if finals.is_empty() { vec![n - 1] } else { finals };
    Transducer::new(alphabet, names, 0, finals, trans).expect("generated machine is well formed")
}

fn random_output(rng: &mut impl Rng) -> Regex {
    let letter = |rng: &mut dyn rand::RngCore| Regex::Letter(rng.gen_range(0..2));
    match rng.gen_range(0..6) {
        0 => Regex::star(letter(rng)),
        1 => Regex::union(letter(rng), Regex::concat(letter(rng), letter(rng))),
        2 => Regex::concat(Regex::star(letter(rng)), letter(rng)),
        3 => Regex::concat(letter(rng), letter(rng)),
        _ => letter(rng),
    }
}
