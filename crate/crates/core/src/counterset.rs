//! Ultimately periodic subsets of ℕ and the counter-value sets of a transducer.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::regular::{Automaton, Regex};
use crate::transducer::Transducer;

/// An ultimately periodic set: below `threshold` membership is listed
/// explicitly, from `threshold` on it depends only on `n mod period`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPSet {
    threshold: u64,
    finite: BTreeSet<u64>,
    period: u64,
    residues: BTreeSet<u64>,
}

impl UPSet {
    pub fn empty() -> Self {
        Self {
            threshold: 0,
            finite: BTreeSet::new(),
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    pub fn naturals() -> Self {
        Self::progression(0, 1)
    }

    pub fn singleton(n: u64) -> Self {
        Self::finite([n])
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> Self {
        let finite: BTreeSet<u64> = elems.into_iter().collect();
        let threshold = finite.last().map_or(0, |m| m + 1);
        Self {
            threshold,
            finite,
            period: 1,
            residues: BTreeSet::new(),
        }
        .normalized()
    }

    /// `{start + period·t : t ≥ 0}`.
    pub fn progression(start: u64, period: u64) -> Self {
        assert!(period > 0, "period must be positive");
        Self::from_parts(start, [], period, [start % period])
    }

    pub fn from_parts(
        threshold: u64,
        finite: impl IntoIterator<Item = u64>,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Self {
        assert!(period > 0, "period must be positive");
        Self {
            threshold,
            finite: finite.into_iter().filter(|&n| n < threshold).collect(),
            period,
            residues: residues.into_iter().map(|r| r % period).collect(),
        }
        .normalized()
    }

    /// Set with the given membership on `[0, threshold + period)`, extended periodically.
    pub fn from_fn(threshold: u64, period: u64, f: impl Fn(u64) -> bool) -> Self {
        let finite = (0..threshold).filter(|&n| f(n));
        let residues: Vec<u64> = (threshold..threshold + period).filter(|&n| f(n)).collect();
        Self::from_parts(threshold, finite, period, residues)
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn finite_part(&self) -> &BTreeSet<u64> {
        &self.finite
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.finite.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.residues.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    /// Tail period of an infinite set, `None` for finite sets.
    pub fn tail_period(&self) -> Option<u64> {
        (!self.is_finite()).then_some(self.period)
    }

    fn combine(&self, other: &UPSet, f: impl Fn(bool, bool) -> bool) -> UPSet {
        let b = self.threshold.max(other.threshold);
        let p = lcm(self.period, other.period);
        UPSet::from_fn(b, p, |n| f(self.contains(n), other.contains(n)))
    }

    pub fn intersect(&self, other: &UPSet) -> UPSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &UPSet) -> UPSet {
        self.combine(other, |a, b| a || b)
    }

    /// Minimal period dividing the current one, then the least threshold.
    fn normalized(mut self) -> Self {
        let p = self.period;
        let full: Vec<bool> = (0..p).map(|r| self.residues.contains(&r)).collect();
        let d = divisors(p)
            .into_iter()
            .find(|&d| (0..p).all(|r| full[r as usize] == full[((r + d) % p) as usize]))
            .unwrap_or(p);
        // residue classes mod p are indexed by n mod p for n ≥ threshold
        self.residues = self.residues.iter().map(|r| r % d).collect();
        self.period = d;
        while self.threshold > 0 {
            let n = self.threshold - 1;
            if self.finite.contains(&n) == self.residues.contains(&(n % d)) {
                self.finite.remove(&n);
                self.threshold = n;
            } else {
                break;
            }
        }
        self
    }

    /// Arithmetic progressions `(start, period)` covering the tail, each
    /// started as early as membership allows.
    pub fn progressions(&self) -> Vec<(u64, u64)> {
        let p = self.period;
        let mut out: Vec<(u64, u64)> = self
            .residues
            .iter()
            .map(|&r| {
                let mut start = first_at_least(self.threshold, r, p);
                while start >= p && self.contains(start - p) {
                    start -= p;
                }
                (start, p)
            })
            .collect();
        out.sort();
        out
    }

    /// Members not covered by [`Self::progressions`].
    pub fn isolated(&self) -> Vec<u64> {
        let progs = self.progressions();
        self.finite
            .iter()
            .copied()
            .filter(|&n| !progs.iter().any(|&(s, p)| n >= s && (n - s) % p == 0))
            .collect()
    }

    /// Largest isolated element or progression start.
    pub fn max_remainder(&self) -> Option<u64> {
        self.isolated()
            .into_iter()
            .chain(self.progressions().into_iter().map(|(s, _)| s))
            .max()
    }
}

impl Default for UPSet {
    fn default() -> Self {
        Self::empty()
    }
}

/// Canonical rendering, e.g. `{2} ∪ {5+6t}`, `{3t}`, `{t}`, `∅`.
impl fmt::Display for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let iso = self.isolated();
        if !iso.is_empty() {
            let list: Vec<String> = iso.iter().map(u64::to_string).collect();
            parts.push(format!("{{{}}}", list.join(", ")));
        }
        for (s, p) in self.progressions() {
            let step = if p == 1 { "t".to_string() } else { format!("{p}t") };
            parts.push(if s == 0 { format!("{{{step}}}") } else { format!("{{{s}+{step}}}") });
        }
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" ∪ "))
        }
    }
}

fn first_at_least(b: u64, r: u64, p: u64) -> u64 {
    let base = b - b % p + r;
    if base >= b {
        base
    } else {
        base + p
    }
}

fn divisors(p: u64) -> Vec<u64> {
    (1..=p).filter(|d| p.is_multiple_of(*d)).collect()
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Counter sets of every state, with the global period and the types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NSetReport {
    pub minus: Vec<UPSet>,
    pub plus: Vec<UPSet>,
    pub both: Vec<UPSet>,
    pub period: u64,
    pub types: Vec<BTreeSet<u64>>,
    /// Counter cap the sets were certified at.
    pub cap: u64,
}

impl NSetReport {
    /// `N(q)` rebuilt from `τ(q)` and `P`.
    pub fn reconstruct(&self, q: usize, n: u64) -> bool {
        let p = self.period;
        let t = &self.types[q];
        if n < p {
            t.contains(&n)
        } else {
            t.iter().any(|&r| r >= p && n % p == r % p)
        }
    }
}

/// A one-counter system: control states with counter increments `±1`.
struct CounterSystem {
    states: usize,
    edges: Vec<(usize, usize, i8)>,
}

struct Explored {
    height: u64,
    reached: Vec<Vec<bool>>,
}

impl CounterSystem {
    fn step(&self, from: usize, c: u64, height: u64) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.edges.iter().filter(move |e| e.0 == from).filter_map(move |&(_, to, d)| {
            let n = c as i64 + d as i64;
            (n >= 0 && n as u64 <= height).then_some((to, n as u64))
        })
    }

    fn explore(&self, sources: &[(usize, u64)], height: u64) -> Explored {
        let mut reached = vec![vec![false; height as usize + 1]; self.states];
        let mut queue = VecDeque::new();
        for &(q, c) in sources {
            if c <= height && !reached[q][c as usize] {
                reached[q][c as usize] = true;
                queue.push_back((q, c));
            }
        }
        while let Some((q, c)) = queue.pop_front() {
            for (t, n) in self.step(q, c, height) {
                if !reached[t][n as usize] {
                    reached[t][n as usize] = true;
                    queue.push_back((t, n));
                }
            }
        }
        Explored { height, reached }
    }

    /// Least counter value `c` such that `(s, c)` reaches `(s, c + w)`, if any
    /// within `height`. Pumpability is monotone in `c`.
    fn min_pump_base(&self, s: usize, w: u64, height: u64) -> Option<u64> {
        if w > height {
            return None;
        }
        let pumps = |c: u64| self.explore(&[(s, c)], height).reached[s][(c + w) as usize];
        let (mut lo, mut hi) = (0, height - w);
        if !pumps(hi) {
            return None;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            if pumps(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }

    /// Exact slices on `[0, cap]` with tails certified by pump witnesses.
    fn certified_sets(&self, sources: &[(usize, u64)], cap: u64) -> Result<Vec<UPSet>> {
        let k = self.states as u64;
        let height = cap + k * k;
        let ex = self.explore(sources, height);
        let max_w = k.clamp(1, 63);
        let mut bases = vec![vec![None; max_w as usize + 1]; self.states];
        for (s, row) in bases.iter_mut().enumerate() {
            for w in 1..=max_w {
                row[w as usize] = self.min_pump_base(s, w, height);
            }
        }
        let masks = self.pump_masks(&ex, &bases);
        (0..self.states)
            .map(|q| self.certify_state(q, &ex, &masks[q], cap))
            .collect()
    }

    /// Bit `w` of `mask[q][c]`: some reachable predecessor of `(q, c)` admits a
    /// pump of weight `w`, so `(q, c + k·w)` is reachable for every `k`.
    fn pump_masks(&self, ex: &Explored, bases: &[Vec<Option<u64>>]) -> Vec<Vec<u64>> {
        let h = ex.height;
        let mut mask = vec![vec![0u64; h as usize + 1]; self.states];
        let mut queue = VecDeque::new();
        for q in 0..self.states {
            for c in 0..=h {
                if !ex.reached[q][c as usize] {
                    continue;
                }
                let mut m = 0u64;
                for (w, b) in bases[q].iter().enumerate() {
                    if matches!(b, Some(b) if c >= *b) {
                        m |= 1 << w;
                    }
                }
                if m != 0 {
                    mask[q][c as usize] = m;
                    queue.push_back((q, c));
                }
            }
        }
        while let Some((q, c)) = queue.pop_front() {
            let m = mask[q][c as usize];
            for (t, n) in self.step(q, c, h) {
                let cur = &mut mask[t][n as usize];
                if *cur | m != *cur {
                    *cur |= m;
                    queue.push_back((t, n));
                }
            }
        }
        mask
    }

    fn certify_state(&self, q: usize, ex: &Explored, mask: &[u64], cap: u64) -> Result<UPSet> {
        let data: Vec<bool> = ex.reached[q][..=cap as usize].to_vec();
        let (b, p) = periodic_window(&data).ok_or_else(|| Error::Certification {
            cap,
            msg: format!("no period with a two-period agreement window for state {q}"),
        })?;
        let set = UPSet::from_fn(b, p, |n| data[n as usize]);
        if set.is_finite() {
            return Ok(set);
        }
        let weights: Vec<u64> = (1..64u64).filter(|w| mask.iter().any(|m| m & (1 << w) != 0)).collect();
        let span = weights.iter().fold(p, |acc, &w| lcm(acc, w));
        if span > 1 << 20 {
            return Err(Error::Certification {
                cap,
                msg: format!("pump period span {span} too large for state {q}"),
            });
        }
        for m in cap + 1..=cap + span {
            if !set.contains(m) {
                continue;
            }
            let covered = (0..=ex.height.min(m)).any(|n| {
                ex.reached[q][n as usize] && weights.iter().any(|&w| mask[n as usize] & (1 << w) != 0 && (m - n) % w == 0)
            });
            if !covered {
                return Err(Error::Certification {
                    cap,
                    msg: format!("no pump witness for counter value {m} at state {q}"),
                });
            }
        }
        Ok(set)
    }
}

/// Earliest threshold (then least period `p`) such that `data` is
/// `p`-periodic from there on, over a window spanning at least two periods.
fn periodic_window(data: &[bool]) -> Option<(u64, u64)> {
    let len = data.len();
    let mut best: Option<(usize, usize)> = None;
    for p in 1..=len / 2 {
        // smallest b with data[n] == data[n+p] for all n in [b, len-p)
        let mut b = len - p;
        while b > 0 && data[b - 1] == data[b - 1 + p] {
            b -= 1;
        }
        if len - b >= 2 * p && best.is_none_or(|(bb, _)| b < bb) {
            best = Some((b, p));
        }
    }
    best.map(|(b, p)| (b as u64, p as u64))
}

/// Default counter cap `2·|Q|² + 4·|Q| + 4`.
pub fn default_cap(states: usize) -> u64 {
    let k = states as u64;
    2 * k * k + 4 * k + 4
}

fn forward_system(m: &Transducer) -> CounterSystem {
    CounterSystem {
        states: m.num_states(),
        edges: m
            .transitions()
            .iter()
            .map(|t| (t.from, t.to, if t.bit == 0 { 1 } else { -1 }))
            .collect(),
    }
}

fn backward_system(m: &Transducer) -> CounterSystem {
    CounterSystem {
        states: m.num_states(),
        edges: m
            .transitions()
            .iter()
            .map(|t| (t.to, t.from, if t.bit == 0 { -1 } else { 1 }))
            .collect(),
    }
}

/// `N₋`, `N₊`, `N`, `P` and `τ` at the default cap, doubling it up to three
/// times when certification fails.
pub fn reach_sets(m: &Transducer) -> Result<NSetReport> {
    let mut cap = default_cap(m.num_states());
    let mut last = None;
    for _ in 0..4 {
        match reach_sets_with_cap(m, cap) {
            Ok(r) => return Ok(r),
            Err(e @ Error::Certification { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
        cap *= 2;
    }
    Err(last.expect("at least one attempt"))
}

pub fn reach_sets_with_cap(m: &Transducer, cap: u64) -> Result<NSetReport> {
    let minus = forward_system(m).certified_sets(&[(m.initial(), 0)], cap)?;
    let finals: Vec<(usize, u64)> = m.finals().map(|f| (f, 0)).collect();
    let mut plus = backward_system(m).certified_sets(&finals, cap)?;
    if m.accepts_empty_input() && !m.is_final(m.initial()) {
        // a validated machine accepting ε keeps that run outside its finals
        let i = m.initial();
        plus[i] = plus[i].union(&UPSet::singleton(0));
    }
    if minus.len() != plus.len() {
        return Err(Error::Inconsistency("direction sizes differ".into()));
    }
    let both: Vec<UPSet> = minus.iter().zip(&plus).map(|(a, b)| a.intersect(b)).collect();
    let period = global_period(&both);
    let types = both
        .iter()
        .map(|s| (0..2 * period).filter(|&n| s.contains(n)).collect())
        .collect();
    Ok(NSetReport {
        minus,
        plus,
        both,
        period,
        types,
        cap,
    })
}

/// Least multiple of the tail periods exceeding every remainder, at least 2.
fn global_period(sets: &[UPSet]) -> u64 {
    let base = sets.iter().filter_map(UPSet::tail_period).fold(1, lcm);
    let floor = sets.iter().filter_map(UPSet::max_remainder).max().map_or(0, |r| r + 1).max(2);
    floor.div_ceil(base) * base
}

/// Close-depth image of `L(r) ∩ Suf(D1)` for a binary expression `r`.
pub fn worked_close_image(r: &Regex) -> Result<UPSet> {
    let a = Automaton::from_regex(r, 2);
    let Some(init) = a.initial() else {
        return Ok(UPSet::empty());
    };
    let n = a.num_states();
    let mut edges = Vec::new();
    for s in 0..n as u32 {
        for (bit, t) in a.successors(s) {
            edges.push((t as usize, s as usize, if bit == 0 { -1 } else { 1 }));
        }
    }
    let sys = CounterSystem { states: n, edges };
    let finals: Vec<(usize, u64)> = (0..n as u32).filter(|&s| a.is_final(s)).map(|s| (s as usize, 0)).collect();
    let mut cap = default_cap(n);
    for attempt in 0..4 {
        match sys.certified_sets(&finals, cap) {
            Ok(mut sets) => return Ok(sets.swap_remove(init as usize)),
            Err(e) if attempt == 3 => return Err(e),
            Err(_) => cap *= 2,
        }
    }
    unreachable!()
}
