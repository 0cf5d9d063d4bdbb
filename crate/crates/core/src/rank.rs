//! Ordinals below ω² and rank bounds for transducer languages and their
//! concatenations and iterations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::components::{certify_component, condense, cycle_profile, ComponentVerdict, Condensation, CycleProfile};
use crate::counterset::{reach_sets, reach_sets_with_cap, NSetReport};
use crate::error::{Error, Result};
use crate::regular::{finite_rank_bound, regular_scattered, Automaton, Scatteredness};
use crate::transducer::{build_mprime, Transducer, TransducerPrime};
use crate::words::{primitive_root, OrderedAlphabet, Word};

/// `ω·a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    pub a: u64,
    pub b: u64,
}

impl Ordinal {
    pub const ZERO: Ordinal = Ordinal { a: 0, b: 0 };
    pub const OMEGA: Ordinal = Ordinal { a: 1, b: 0 };

    pub fn new(a: u64, b: u64) -> Self {
        Self { a, b }
    }

    pub fn finite(b: u64) -> Self {
        Self { a: 0, b }
    }

    pub fn is_finite(self) -> bool {
        self.a == 0
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a, self.b).cmp(&(other.a, other.b))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, b) => write!(f, "{b}"),
            (1, 0) => write!(f, "w"),
            (1, b) => write!(f, "w+{b}"),
            (a, 0) => write!(f, "w*{a}"),
            (a, b) => write!(f, "w*{a}+{b}"),
        }
    }
}

/// Ordinal sum `x + y`.
pub fn ord_add(x: Ordinal, y: Ordinal) -> Ordinal {
    if y.a >= 1 {
        Ordinal::new(x.a + y.a, y.b)
    } else {
        Ordinal::new(x.a, x.b + y.b)
    }
}

pub fn ord_max(x: Ordinal, y: Ordinal) -> Ordinal {
    x.max(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Certified,
    ConditionalOnScattered,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::ConditionalOnScattered => "conditional_on_scattered",
        }
    }

    fn join(self, other: Status) -> Status {
        self.max(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankBound {
    pub value: Ordinal,
    pub status: Status,
    pub derivation: Vec<String>,
}

/// Two members (or cycle outputs) with distinct primitive roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub x: Word,
    pub y: Word,
    pub context: String,
}

impl Witness {
    /// The dense family generated from the pair.
    pub fn family(&self, alphabet: &OrderedAlphabet) -> String {
        let (u, v) = (alphabet.render(&self.x), alphabet.render(&self.y));
        format!("{{{u}{v}{u}{v},{v}{u}{v}{u}}}*{u}{v}{v}{u}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankVerdict {
    Bound(RankBound),
    NotScattered(Witness),
    Unknown(String),
}

impl RankVerdict {
    pub fn bound(&self) -> Option<&RankBound> {
        match self {
            RankVerdict::Bound(b) => Some(b),
            _ => None,
        }
    }

    pub fn status_tag(&self) -> &'static str {
        match self {
            RankVerdict::Bound(b) => b.status.tag(),
            RankVerdict::NotScattered(_) => "not_scattered",
            RankVerdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeOutcome {
    Bound(Ordinal, Status),
    NotScattered(Witness),
}

/// Finite rank bound of each transition output of the base machine, or a
/// density witness inside the output.
pub fn output_ranks(m: &Transducer) -> Vec<std::result::Result<u64, Witness>> {
    (0..m.transitions().len())
        .map(|i| {
            let a = m.output(i);
            match regular_scattered(a) {
                Scatteredness::Scattered => Ok(finite_rank_bound(a).expect("scattered")),
                Scatteredness::QuasiDense { x, y, .. } => Err(Witness {
                    x,
                    y,
                    context: format!("cycle words of the output of transition {i}"),
                }),
            }
        })
        .collect()
}

fn join(a: &EdgeOutcome, b: &EdgeOutcome) -> EdgeOutcome {
    match (a, b) {
        (EdgeOutcome::NotScattered(w), _) | (_, EdgeOutcome::NotScattered(w)) => EdgeOutcome::NotScattered(w.clone()),
        (EdgeOutcome::Bound(x, s), EdgeOutcome::Bound(y, t)) => EdgeOutcome::Bound(ord_max(*x, *y), s.join(*t)),
    }
}

/// Per crossing transition of `M′`, a bound on the rank of the outputs of
/// accepting-prefix runs ending with it, computed along the condensation.
pub fn edge_bounds(
    mp: &TransducerPrime,
    cond: &Condensation,
    verdicts: &[ComponentVerdict],
    regranks: &[std::result::Result<u64, Witness>],
    derivation: &mut Vec<String>,
) -> Result<BTreeMap<usize, EdgeOutcome>> {
    let mut out: BTreeMap<usize, EdgeOutcome> = BTreeMap::new();
    let crossing = cond.crossing(mp);
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); cond.sccs.len()];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); cond.sccs.len()];
    for &i in &crossing {
        let t = &mp.transitions()[i];
        let (a, b) = (cond.component_of[t.from], cond.component_of[t.to]);
        if a >= b {
            return Err(Error::Inconsistency("condensation is cyclic".into()));
        }
        outgoing[a].push(i);
        incoming[b].push(i);
    }
    let init_comp = mp.initial().map(|s| cond.component_of[s]);
    for (c, scc) in cond.sccs.iter().enumerate() {
        if outgoing[c].is_empty() {
            continue;
        }
        let mut inc = if Some(c) == init_comp {
            Some(EdgeOutcome::Bound(Ordinal::ZERO, Status::Certified))
        } else {
            None
        };
        for e in incoming[c].iter().filter_map(|i| out.get(i)) {
            inc = Some(match inc {
                Some(acc) => join(&acc, e),
                None => e.clone(),
            });
        }
        let Some(inc) = inc else { continue };
        let internal_max = cond
            .internal(mp, c)
            .iter()
            .map(|&i| regranks[mp.transitions()[i].origin].clone())
            .try_fold(0u64, |acc, r| r.map(|v| acc.max(v)));
        for &i in &outgoing[c] {
            let label = edge_label(mp, i);
            let outcome = match (&inc, &regranks[mp.transitions()[i].origin], &verdicts[c], &internal_max) {
                (EdgeOutcome::NotScattered(w), ..) => EdgeOutcome::NotScattered(w.clone()),
                (_, Err(w), ..) | (_, _, _, Err(w)) => EdgeOutcome::NotScattered(w.clone()),
                (_, _, ComponentVerdict::QuasiDenseWitness { state, x, y }, _) => EdgeOutcome::NotScattered(Witness {
                    x: x.clone(),
                    y: y.clone(),
                    context: format!("cycle outputs at {}", mp.label(*state)),
                }),
                (EdgeOutcome::Bound(v, s), Ok(f), verdict, Ok(imax)) => {
                    let (step, status, how) = match verdict {
                        _ if scc.trivial => (Ordinal::finite(*f), *s, format!("trivial, f={f}")),
                        ComponentVerdict::FullyCertified(_) => {
                            let fc = scc.members.len() as u64 * (1 + imax) + f;
                            (Ordinal::finite(fc), *s, format!("root-certified, f_C={fc}"))
                        }
                        _ => (Ordinal::OMEGA, Status::ConditionalOnScattered, "zero-certified, +w".to_string()),
                    };
                    let value = ord_add(step, *v);
                    derivation.push(format!("{label}: {how}, in={v} -> {value}"));
                    EdgeOutcome::Bound(value, status)
                }
            };
            if let EdgeOutcome::NotScattered(w) = &outcome {
                derivation.push(format!("{label}: not scattered ({})", w.context));
            }
            out.insert(i, outcome);
        }
    }
    Ok(out)
}

fn edge_label(mp: &TransducerPrime, i: usize) -> String {
    let t = &mp.transitions()[i];
    format!("{} -{}-> {}", mp.label(t.from), t.bit, mp.label(t.to))
}

/// Everything the rank pipeline computes for one machine.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub machine: Transducer,
    pub report: NSetReport,
    pub mprime: TransducerPrime,
    pub condensation: Condensation,
    pub profiles: Vec<Option<CycleProfile>>,
    pub verdicts: Vec<ComponentVerdict>,
    pub verdict: RankVerdict,
}

pub fn analyse(m: &Transducer, cap: Option<u64>) -> Result<Analysis> {
    let machine = m.validate()?;
    let report = match cap {
        Some(c) => reach_sets_with_cap(&machine, c)?,
        None => reach_sets(&machine)?,
    };
    let mprime = build_mprime(&machine, &report)?;
    let condensation = condense(&mprime)?;
    let profiles: Vec<Option<CycleProfile>> = condensation
        .sccs
        .iter()
        .map(|c| (!c.trivial).then(|| cycle_profile(&mprime, c)).transpose())
        .collect::<Result<_>>()?;
    let verdicts: Vec<ComponentVerdict> = condensation
        .sccs
        .iter()
        .zip(&profiles)
        .map(|(c, p)| certify_component(&mprime, c, p.as_ref()))
        .collect();
    let regranks = output_ranks(&machine);
    let mut derivation = Vec::new();
    let edges = edge_bounds(&mprime, &condensation, &verdicts, &regranks, &mut derivation)?;
    let mut total: Option<EdgeOutcome> = None;
    if mprime.accepts_empty_input() {
        total = Some(EdgeOutcome::Bound(Ordinal::ZERO, Status::Certified));
    }
    for (&i, e) in &edges {
        if mprime.is_final(mprime.transitions()[i].to) {
            total = Some(match total {
                Some(acc) => join(&acc, e),
                None => e.clone(),
            });
        }
    }
    let verdict = match total.unwrap_or(EdgeOutcome::Bound(Ordinal::ZERO, Status::Certified)) {
        EdgeOutcome::NotScattered(w) => RankVerdict::NotScattered(w),
        EdgeOutcome::Bound(value, status) => RankVerdict::Bound(RankBound {
            value,
            status,
            derivation,
        }),
    };
    Ok(Analysis {
        machine,
        report,
        mprime,
        condensation,
        profiles,
        verdicts,
        verdict,
    })
}

pub fn transducer_rank_bound(m: &Transducer) -> Result<RankVerdict> {
    Ok(analyse(m, None)?.verdict)
}

/// One-counter expressions: transducer languages closed under
/// concatenation and Kleene plus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RocExpr {
    Atom(Box<Transducer>),
    Concat(Box<RocExpr>, Box<RocExpr>),
    Plus(Box<RocExpr>),
}

impl RocExpr {
    pub fn atom(m: Transducer) -> Self {
        RocExpr::Atom(Box::new(m))
    }

    pub fn concat(a: RocExpr, b: RocExpr) -> Self {
        RocExpr::Concat(Box::new(a), Box::new(b))
    }

    pub fn plus(a: RocExpr) -> Self {
        RocExpr::Plus(Box::new(a))
    }

    pub fn alphabet(&self) -> &OrderedAlphabet {
        match self {
            RocExpr::Atom(m) => m.alphabet(),
            RocExpr::Concat(a, _) | RocExpr::Plus(a) => a.alphabet(),
        }
    }

    /// Regular superset of the language: the Dyck constraint is dropped.
    pub fn overapproximation(&self) -> Automaton {
        match self {
            RocExpr::Atom(m) => m.output_overapproximation(),
            RocExpr::Concat(a, b) => a.overapproximation().concat(&b.overapproximation()),
            RocExpr::Plus(a) => a.overapproximation().plus(),
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(match self {
            RocExpr::Atom(m) => {
                let v = m.validate()?;
                !v.accepts_empty_input() && !reach_sets(&v)?.plus[v.initial()].contains(0)
            }
            RocExpr::Concat(a, b) => a.is_empty()? || b.is_empty()?,
            RocExpr::Plus(a) => a.is_empty()?,
        })
    }
}

/// Caps for the enumeration used by the refutation search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub input_cap: usize,
    pub output_cap: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        Self {
            input_cap: 8,
            output_cap: 12,
        }
    }
}

/// Two enumerated members with distinct primitive roots, least first.
pub fn distinct_root_pair(words: &[Word]) -> Option<(Word, Word)> {
    let mut sorted: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let x = *sorted.first()?;
    let rx = primitive_root(x).expect("nonempty");
    let y = sorted.iter().find(|w| primitive_root(w).expect("nonempty") != rx)?;
    Some((x.clone(), (*y).clone()))
}

pub fn expr_rank_bound(e: &RocExpr, caps: SearchCaps) -> Result<RankVerdict> {
    match e {
        RocExpr::Atom(m) => transducer_rank_bound(m),
        RocExpr::Concat(e1, e2) => {
            let (b1, b2) = (expr_rank_bound(e1, caps)?, expr_rank_bound(e2, caps)?);
            if let RankVerdict::NotScattered(w) = &b1 {
                if !e2.is_empty()? {
                    return Ok(RankVerdict::NotScattered(w.clone()));
                }
            }
            if let RankVerdict::NotScattered(w) = &b2 {
                if !e1.is_empty()? {
                    return Ok(RankVerdict::NotScattered(w.clone()));
                }
            }
            if e1.is_empty()? || e2.is_empty()? {
                return Ok(RankVerdict::Bound(RankBound {
                    value: Ordinal::ZERO,
                    status: Status::Certified,
                    derivation: vec!["concatenation with an empty language".into()],
                }));
            }
            match (b1, b2) {
                (RankVerdict::Bound(x), RankVerdict::Bound(y)) => {
                    let value = ord_add(y.value, x.value);
                    let mut derivation = x.derivation;
                    derivation.extend(y.derivation);
                    derivation.push(format!("concat: {} + {} -> {value}", y.value, x.value));
                    Ok(RankVerdict::Bound(RankBound {
                        value,
                        status: x.status.join(y.status),
                        derivation,
                    }))
                }
                (RankVerdict::Unknown(d), _) | (_, RankVerdict::Unknown(d)) => Ok(RankVerdict::Unknown(d)),
                _ => unreachable!("not-scattered operands handled above"),
            }
        }
        RocExpr::Plus(inner) => {
            let over = inner.overapproximation();
            let Some(x) = over.shortest_nonempty_word() else {
                return Ok(RankVerdict::Bound(RankBound {
                    value: Ordinal::ZERO,
                    status: Status::Certified,
                    derivation: vec!["plus: no nonempty member".into()],
                }));
            };
            let v = primitive_root(&x)?;
            if over.is_subset_of(&Automaton::power_of(&v, over.alphabet_len())?) {
                return Ok(RankVerdict::Bound(RankBound {
                    value: Ordinal::finite(1),
                    status: Status::Certified,
                    derivation: vec![format!("plus: outputs within {}*", inner.alphabet().render(&v))],
                }));
            }
            if let RankVerdict::NotScattered(w) = expr_rank_bound(inner, caps)? {
                return Ok(RankVerdict::NotScattered(w));
            }
            let members = crate::harness::enumerate_expr(inner, caps.input_cap, caps.output_cap)?;
            match distinct_root_pair(&members.words) {
                Some((x, y)) => Ok(RankVerdict::NotScattered(Witness {
                    x,
                    y,
                    context: "members of the iterated language".into(),
                })),
                None => Ok(RankVerdict::Unknown(format!(
                    "no common root for the over-approximation and no distinct-root members within input cap {} and output cap {}",
                    caps.input_cap, caps.output_cap
                ))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering() {
        let r = |a, b| Ordinal::new(a, b).to_string();
        assert_eq!(r(0, 0), "0");
        assert_eq!(r(0, 5), "5");
        assert_eq!(r(1, 0), "w");
        assert_eq!(r(2, 0), "w*2");
        assert_eq!(r(2, 3), "w*2+3");
        assert_eq!(r(1, 5), "w+5");
    }

    #[test]
    fn addition_examples() {
        assert_eq!(ord_add(Ordinal::new(2, 3), Ordinal::new(1, 5)), Ordinal::new(3, 5));
        assert_eq!(ord_add(Ordinal::finite(7), Ordinal::OMEGA), Ordinal::OMEGA);
        assert_eq!(ord_add(Ordinal::OMEGA, Ordinal::finite(7)), Ordinal::new(1, 7));
    }

    #[test]
    fn max_examples() {
        assert_eq!(ord_max(Ordinal::OMEGA, Ordinal::finite(100)), Ordinal::OMEGA);
        assert_eq!(ord_max(Ordinal::new(2, 0), Ordinal::new(1, 99)), Ordinal::new(2, 0));
        let x = Ordinal::new(3, 4);
        assert_eq!(ord_max(x, x), x);
    }

    #[test]
    fn ordinal_laws_exhaustive() {
        let all: Vec<Ordinal> = (0..=20).flat_map(|a| (0..=20).map(move |b| Ordinal::new(a, b))).collect();
        for &x in &all {
            assert_eq!(ord_max(x, x), x);
            for &y in &all {
                assert_eq!(ord_max(x, y), ord_max(y, x));
                if x.is_finite() && y.a >= 1 {
                    assert_eq!(ord_add(x, y), y);
                }
            }
        }
        let some: Vec<Ordinal> = all.iter().copied().step_by(7).collect();
        for &x in &some {
            for &y in &some {
                for &z in &some {
                    assert_eq!(ord_add(ord_add(x, y), z), ord_add(x, ord_add(y, z)));
                }
            }
        }
    }
}
