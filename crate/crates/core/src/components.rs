//! Strongly connected components of `M′`, their cycle weights, and
//! primitive-root certificates for their cycle outputs.

use num_rational::Ratio;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::regular::{common_root, Automaton, Nfa, RootCheck};
use crate::transducer::{Phase, TransducerPrime};
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scc {
    pub members: Vec<usize>,
    pub phase: Phase,
    /// Singleton without a self-loop.
    pub trivial: bool,
    /// Length of the longest chain of components leading here.
    pub height: usize,
}

#[derive(Debug, Clone)]
pub struct Condensation {
    /// Components in topological order: every edge goes forward.
    pub sccs: Vec<Scc>,
    pub component_of: Vec<usize>,
}

impl Condensation {
    /// Transitions of `M′` whose endpoints lie in different components.
    pub fn crossing(&self, mp: &TransducerPrime) -> Vec<usize> {
        (0..mp.transitions().len())
            .filter(|&i| {
                let t = &mp.transitions()[i];
                self.component_of[t.from] != self.component_of[t.to]
            })
            .collect()
    }

    /// Transitions with both endpoints in component `c`.
    pub fn internal(&self, mp: &TransducerPrime, c: usize) -> Vec<usize> {
        (0..mp.transitions().len())
            .filter(|&i| {
                let t = &mp.transitions()[i];
                self.component_of[t.from] == c && self.component_of[t.to] == c
            })
            .collect()
    }
}

pub fn condense(mp: &TransducerPrime) -> Result<Condensation> {
    let n = mp.num_states();
    let mut g = DiGraph::<(), ()>::with_capacity(n, mp.transitions().len());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for t in mp.transitions() {
        g.add_edge(nodes[t.from], nodes[t.to], ());
    }
    let mut raw = tarjan_scc(&g);
    raw.reverse();
    let mut component_of = vec![0; n];
    for (i, c) in raw.iter().enumerate() {
        for v in c {
            component_of[v.index()] = i;
        }
    }
    let mut height = vec![0usize; raw.len()];
    for t in mp.transitions() {
        let (a, b) = (component_of[t.from], component_of[t.to]);
        if a > b {
            return Err(Error::Inconsistency("condensation is not topologically ordered".into()));
        }
    }
    // edges only go forward, so one ordered sweep settles heights
    let mut order: Vec<(usize, usize)> = mp
        .transitions()
        .iter()
        .map(|t| (component_of[t.from], component_of[t.to]))
        .filter(|(a, b)| a != b)
        .collect();
    order.sort();
    for (a, b) in order {
        height[b] = height[b].max(height[a] + 1);
    }
    let mut sccs = Vec::with_capacity(raw.len());
    for (i, c) in raw.iter().enumerate() {
        let mut members: Vec<usize> = c.iter().map(|v| v.index()).collect();
        members.sort();
        let phase = mp.states()[members[0]].phase;
        if members.iter().any(|&s| mp.states()[s].phase != phase) {
            return Err(Error::Inconsistency(format!("component {i} mixes phases")));
        }
        let trivial = members.len() == 1 && !mp.transitions().iter().any(|t| t.from == members[0] && t.to == members[0]);
        sccs.push(Scc {
            members,
            phase,
            trivial,
            height: height[i],
        });
    }
    Ok(Condensation { sccs, component_of })
}

/// Cycle weight signs of a component (weight: +1 per 0, −1 per 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleProfile {
    pub has_zero: bool,
    pub has_positive: bool,
    pub has_negative: bool,
    pub max_mean: Ratio<i64>,
    pub min_mean: Ratio<i64>,
}

fn weight(bit: u8) -> i64 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

/// Karp's maximum cycle mean over a strongly connected edge set.
fn max_cycle_mean(n: usize, edges: &[(usize, usize, i64)]) -> Ratio<i64> {
    let mut d = vec![vec![None::<i64>; n]; n + 1];
    d[0][0] = Some(0);
    for k in 1..=n {
        for &(u, v, w) in edges {
            if let Some(x) = d[k - 1][u] {
                let cand = x + w;
                if d[k][v].is_none_or(|y| cand > y) {
                    d[k][v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Ratio<i64>> = None;
    for (v, dn) in d[n].iter().enumerate() {
        let Some(dn) = *dn else { continue };
        let worst = (0..n)
            .filter_map(|k| d[k][v].map(|dk| Ratio::new(dn - dk, (n - k) as i64)))
            .min();
        if let Some(w) = worst {
            best = Some(best.map_or(w, |b| b.max(w)));
        }
    }
    best.expect("strongly connected component has a cycle")
}

pub fn cycle_profile(mp: &TransducerPrime, scc: &Scc) -> Result<CycleProfile> {
    if scc.trivial {
        return Err(Error::Precondition("trivial component has no cycles".into()));
    }
    let local = |s: usize| scc.members.binary_search(&s).ok();
    let mut edges = Vec::new();
    for t in mp.transitions() {
        if let (Some(a), Some(b)) = (local(t.from), local(t.to)) {
            edges.push((a, b, weight(t.bit)));
        }
    }
    let n = scc.members.len();
    let max_mean = max_cycle_mean(n, &edges);
    let neg: Vec<_> = edges.iter().map(|&(a, b, w)| (a, b, -w)).collect();
    let min_mean = -max_cycle_mean(n, &neg);
    let zero = Ratio::from_integer(0);
    let has_positive = max_mean > zero;
    let has_negative = min_mean < zero;
    Ok(CycleProfile {
        has_zero: (has_positive && has_negative) || max_mean == zero || min_mean == zero,
        has_positive,
        has_negative,
        max_mean,
        min_mean,
    })
}

/// Union of the output languages of all cycles through `s` inside the component.
pub fn cycle_outputs(mp: &TransducerPrime, scc: &Scc, s: usize) -> Automaton {
    let k = mp.base().alphabet().len();
    if scc.trivial {
        return Automaton::empty(k);
    }
    let local = |x: usize| scc.members.binary_search(&x).ok();
    let mut nfa = Nfa::new(k);
    let base = nfa.num_states() as u32;
    for _ in &scc.members {
        nfa.add_state();
    }
    let start = nfa.add_state();
    for (i, t) in mp.transitions().iter().enumerate() {
        if let (Some(a), Some(b)) = (local(t.from), local(t.to)) {
            nfa.splice(base + a as u32, mp.output(i), base + b as u32);
            if t.from == s {
                nfa.splice(start, mp.output(i), base + b as u32);
            }
        }
    }
    let home = base + local(s).expect("state belongs to the component") as u32;
    nfa.add_initial(start);
    nfa.set_final(home, true);
    nfa.determinize().minimized()
}

/// Output languages of weight-zero cycles through `s` whose running weight
/// stays within `±bound`.
pub fn zero_cycle_outputs(mp: &TransducerPrime, scc: &Scc, s: usize, bound: i64) -> Automaton {
    let k = mp.base().alphabet().len();
    if scc.trivial {
        return Automaton::empty(k);
    }
    let local = |x: usize| scc.members.binary_search(&x).ok();
    let width = (2 * bound + 1) as usize;
    let mut nfa = Nfa::new(k);
    for _ in 0..scc.members.len() * width {
        nfa.add_state();
    }
    let node = |m: usize, w: i64| (m * width + (w + bound) as usize) as u32;
    let start = nfa.add_state();
    for (i, t) in mp.transitions().iter().enumerate() {
        let (Some(a), Some(b)) = (local(t.from), local(t.to)) else { continue };
        let dw = weight(t.bit);
        for w in -bound..=bound {
            let nw = w + dw;
            if nw.abs() <= bound {
                nfa.splice(node(a, w), mp.output(i), node(b, nw));
            }
        }
        if t.from == s {
            nfa.splice(start, mp.output(i), node(b, dw));
        }
    }
    nfa.add_initial(start);
    nfa.set_final(node(local(s).expect("state belongs to the component"), 0), true);
    nfa.determinize().minimized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Every cycle output, by exact regular inclusion.
    Full,
    /// Weight-zero cycles whose running weight stays within the bound.
    ZeroOnly { bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCertificate {
    /// Per member state: the common primitive root, or `None` if every
    /// cycle output in scope is empty.
    pub roots: Vec<(usize, Option<Word>)>,
    pub scope: Scope,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentVerdict {
    FullyCertified(RootCertificate),
    ZeroCertified(RootCertificate),
    QuasiDenseWitness { state: usize, x: Word, y: Word },
}

impl ComponentVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            ComponentVerdict::FullyCertified(_) => "fully_certified",
            ComponentVerdict::ZeroCertified(_) => "zero_certified",
            ComponentVerdict::QuasiDenseWitness { .. } => "quasi_dense",
        }
    }
}

/// Stage 1 checks all cycle outputs exactly; on failure a positive cycle
/// makes the split a density witness, otherwise Stage 2 checks weight-zero
/// cycles up to the running-weight bound `|C|·P`.
pub fn certify_component(mp: &TransducerPrime, scc: &Scc, profile: Option<&CycleProfile>) -> ComponentVerdict {
    if scc.trivial {
        return ComponentVerdict::FullyCertified(RootCertificate {
            roots: Vec::new(),
            scope: Scope::Full,
            evidence: "trivial component".into(),
        });
    }
    let mut roots = Vec::new();
    let mut split = None;
    for &s in &scc.members {
        match common_root(&cycle_outputs(mp, scc, s)) {
            RootCheck::Trivial => roots.push((s, None)),
            RootCheck::Common(v) => roots.push((s, Some(v))),
            RootCheck::Split(x, y) => {
                split = Some((s, x, y));
                break;
            }
        }
    }
    let Some((state, x, y)) = split else {
        return ComponentVerdict::FullyCertified(RootCertificate {
            roots,
            scope: Scope::Full,
            evidence: "cycle outputs included in root powers".into(),
        });
    };
    if profile.is_some_and(|p| p.has_positive) {
        return ComponentVerdict::QuasiDenseWitness { state, x, y };
    }
    let bound = scc.members.len() as u64 * mp.period();
    let mut roots = Vec::new();
    for &s in &scc.members {
        match common_root(&zero_cycle_outputs(mp, scc, s, bound as i64)) {
            RootCheck::Trivial => roots.push((s, None)),
            RootCheck::Common(v) => roots.push((s, Some(v))),
            RootCheck::Split(x, y) => return ComponentVerdict::QuasiDenseWitness { state: s, x, y },
        }
    }
    ComponentVerdict::ZeroCertified(RootCertificate {
        roots,
        scope: Scope::ZeroOnly { bound },
        evidence: format!("zero-weight cycle outputs included in root powers, running weight within ±{bound}"),
    })
}
