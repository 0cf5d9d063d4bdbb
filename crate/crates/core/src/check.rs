//! Invariant suite over a machine and its depth-typed normalization.

use std::collections::{BTreeSet, HashSet};

use crate::counterset::{reach_sets, reach_sets_with_cap};
use crate::error::Result;
use crate::harness::upset_oracle;
use crate::report::{dot_machine, dot_prime};
use crate::transducer::{bounded_language_equal, build_mprime, lift_run, project_run, Phase, Rule, Transducer, TransducerPrime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, failure: Option<String>, ok: impl Into<String>) -> Self {
        match failure {
            Some(detail) => Self { name, passed: false, detail },
            None => Self { name, passed: true, detail: ok.into() },
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckLimits {
    /// Input length for run-based checks.
    pub run_len: usize,
    /// Closed-walk length for the cycle-weight check.
    pub cycle_len: usize,
    /// Output cap for the bounded equivalence check.
    pub output_cap: usize,
    /// Counter range compared against the oracle.
    pub counter_bound: u64,
    pub counter_cap: Option<u64>,
}

impl Default for CheckLimits {
    fn default() -> Self {
        Self {
            run_len: 10,
            cycle_len: 12,
            output_cap: 40,
            counter_bound: 20,
            counter_cap: None,
        }
    }
}

/// Each transition carries the single rule whose side conditions it meets.
pub fn check_rules(mp: &TransducerPrime) -> Option<String> {
    mp.transitions().iter().find_map(|t| {
        let (a, b) = (mp.states()[t.from], mp.states()[t.to]);
        let rules: Vec<Rule> = Rule::matching(mp.period(), a, t.bit, b);
        (rules != [t.rule]).then(|| format!("{} -{}-> {} tagged {} matches {:?}", mp.label(t.from), t.bit, mp.label(t.to), t.rule, rules))
    })
}

/// Phases never move backwards along a transition.
pub fn check_monotone(mp: &TransducerPrime) -> Option<String> {
    mp.transitions().iter().find_map(|t| {
        (mp.states()[t.from].phase > mp.states()[t.to].phase)
            .then(|| format!("{} -> {} moves backwards", mp.label(t.from), mp.label(t.to)))
    })
}

/// Up states track the opening depth and eq states its residue on every path
/// from the initial state; down states are exact on accepting runs.
pub fn check_depth(mp: &TransducerPrime, max_len: usize) -> Option<String> {
    let init = mp.initial()?;
    let p = mp.period();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); mp.num_states()];
    for (i, t) in mp.transitions().iter().enumerate() {
        adj[t.from].push(i);
    }
    let mut path = vec![(init, 0u64)];
    depth_walk(mp, &adj, p, max_len, &mut path)
}

fn depth_walk(mp: &TransducerPrime, adj: &[Vec<usize>], p: u64, max_len: usize, path: &mut Vec<(usize, u64)>) -> Option<String> {
    let &(s, open) = path.last().expect("nonempty path");
    let st = mp.states()[s];
    let ok = match st.phase {
        Phase::Up => st.n == open,
        Phase::Eq => st.n % p == open % p,
        Phase::Down => true,
    };
    if !ok {
        return Some(format!("{} reached at depth {open}", mp.label(s)));
    }
    if open == 0 && path.len() > 1 && mp.is_final(s) {
        if let Some(&(bad, d)) = path
            .iter()
            .find(|&&(x, d)| mp.states()[x].phase == Phase::Down && mp.states()[x].n != d)
        {
            return Some(format!("{} at depth {d} on an accepting run", mp.label(bad)));
        }
    }
    if path.len() > max_len {
        return None;
    }
    for &i in &adj[s] {
        let t = &mp.transitions()[i];
        let next = if t.bit == 0 {
            open + 1
        } else if open > 0 {
            open - 1
        } else {
            continue;
        };
        path.push((t.to, next));
        let r = depth_walk(mp, adj, p, max_len, path);
        path.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

/// Closed walks of length ≤ `max_len` inside up or down phases have weight 0.
pub fn check_cycle_weights(mp: &TransducerPrime, max_len: usize) -> Option<String> {
    for s in 0..mp.num_states() {
        let phase = mp.states()[s].phase;
        if phase == Phase::Eq {
            continue;
        }
        let mut frontier: HashSet<(usize, i64)> = HashSet::from([(s, 0)]);
        for _ in 0..max_len {
            let mut next = HashSet::new();
            for &(x, w) in &frontier {
                for t in mp.transitions().iter().filter(|t| t.from == x) {
                    if mp.states()[t.to].phase != phase {
                        continue;
                    }
                    let nw = w + if t.bit == 0 { 1 } else { -1 };
                    if t.to == s && nw != 0 {
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

/// Every accepting run of `M` lifts to an accepting run of `M′` and projects back.
pub fn check_lift(mp: &TransducerPrime, max_len: usize) -> (Option<String>, usize) {
    let runs = mp.base().accepting_runs(max_len);
    for run in &runs {
        let lifted = match lift_run(mp, run) {
            Ok(r) => r,
            Err(e) => return (Some(format!("run {:?}: {e}", run.transitions)), runs.len()),
        };
        if !mp.is_accepting_run(&lifted) {
            return (Some(format!("lift of {:?} is not accepting", run.transitions)), runs.len());
        }
        if project_run(mp, &lifted) != *run {
            return (Some(format!("projection of lifted {:?} differs", run.transitions)), runs.len());
        }
    }
    (None, runs.len())
}

/// Counter sets agree with plain configuration search on `[0, bound]`.
pub fn check_oracle(m: &Transducer, cap: Option<u64>, bound: u64) -> Result<Option<String>> {
    let r = match cap {
        Some(c) => reach_sets_with_cap(m, c)?,
        None => reach_sets(m)?,
    };
    let o = upset_oracle(m, bound);
    for q in 0..m.num_states() {
        let sl = |s: &crate::counterset::UPSet| -> BTreeSet<u64> { (0..=bound).filter(|&n| s.contains(n)).collect() };
        for (kind, mine, theirs) in [("N-", &r.minus[q], &o.minus[q]), ("N+", &r.plus[q], &o.plus[q]), ("N", &r.both[q], &o.both[q])] {
            if sl(mine) != *theirs {
                return Ok(Some(format!("{kind}({}) = {mine} but the oracle finds {theirs:?}", m.name(q))));
            }
        }
    }
    Ok(None)
}

fn dot_counts(dot: &str) -> (usize, usize) {
    let edges = dot.lines().filter(|l| l.contains(" -> ")).count();
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with('"') && !l.contains(" -> ")).count();
    (nodes, edges)
}

/// Runs the full suite on `m` as given.
pub fn run_checks(m: &Transducer, limits: CheckLimits) -> Result<Vec<CheckOutcome>> {
    let report = match limits.counter_cap {
        Some(c) => reach_sets_with_cap(m, c)?,
        None => reach_sets(m)?,
    };
    let mp = build_mprime(m, &report)?;
    let mut out = vec![
        CheckOutcome::new("rules", check_rules(&mp), format!("{} transitions", mp.transitions().len())),
        CheckOutcome::new("monotone", check_monotone(&mp), "phases never move back"),
        CheckOutcome::new("depth", check_depth(&mp, limits.run_len), format!("paths up to length {}", limits.run_len)),
        CheckOutcome::new(
            "cycle-weights",
            check_cycle_weights(&mp, limits.cycle_len),
            format!("closed walks up to length {}", limits.cycle_len),
        ),
    ];
    let (lift, runs) = check_lift(&mp, limits.run_len);
    out.push(CheckOutcome::new("lift-project", lift, format!("{runs} accepting runs")));
    let eq = bounded_language_equal(m, &mp, limits.run_len, limits.output_cap);
    let eq_fail = (!eq.equal).then(|| match &eq.counterexample {
        Some(w) => format!("languages differ on {}", m.alphabet().render(w)),
        None => "languages differ beyond the output cap".to_string(),
    });
    out.push(CheckOutcome::new("equivalence", eq_fail, format!("inputs up to length {}", limits.run_len)));
    out.push(CheckOutcome::new(
        "oracle",
        check_oracle(m, limits.counter_cap, limits.counter_bound)?,
        format!("counters 0..={}", limits.counter_bound),
    ));
    let (n, e) = dot_counts(&dot_machine(m));
    let (np, ep) = dot_counts(&dot_prime(&mp));
    let dot_fail = (n != m.num_states() || e != m.transitions().len() || np != mp.num_states() || ep != mp.transitions().len())
        .then(|| format!("M: {n} nodes {e} edges, M': {np} nodes {ep} edges"));
    out.push(CheckOutcome::new("dot", dot_fail, "one node per state, one edge per transition"));
    Ok(out)
}
