//! JSON and DOT renderings of machines and analysis results.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::components::{ComponentVerdict, Condensation, CycleProfile, RootCertificate, Scope};
use crate::counterset::NSetReport;
use crate::rank::{Analysis, RankVerdict, Witness};
use crate::transducer::{Transducer, TransducerPrime};
use crate::words::OrderedAlphabet;

pub fn nsets_json(m: &Transducer, r: &NSetReport) -> Value {
    let rows: Vec<Value> = (0..m.num_states())
        .map(|q| {
            json!({
                "state": m.name(q),
                "minus": r.minus[q].to_string(),
                "plus": r.plus[q].to_string(),
                "both": r.both[q].to_string(),
            })
        })
        .collect();
    let types: serde_json::Map<String, Value> = (0..m.num_states())
        .map(|q| (m.name(q).to_string(), json!(r.types[q].iter().collect::<Vec<_>>())))
        .collect();
    json!({ "nsets": rows, "period": r.period, "types": types, "counter_cap": r.cap })
}

/// Plain-text table, one state per line, then `P=…`.
pub fn nsets_table(m: &Transducer, r: &NSetReport) -> String {
    let mut out = String::new();
    for q in 0..m.num_states() {
        let _ = writeln!(
            out,
            "{}\tN-: {}\tN+: {}\tN: {}",
            m.name(q),
            r.minus[q],
            r.plus[q],
            r.both[q]
        );
    }
    let _ = writeln!(out, "P={}", r.period);
    for q in 0..m.num_states() {
        let t: Vec<String> = r.types[q].iter().map(u64::to_string).collect();
        let _ = writeln!(out, "type({}) = {{{}}}", m.name(q), t.join(", "));
    }
    out
}

fn typed(mp: &TransducerPrime, s: usize) -> Value {
    let t = mp.states()[s];
    json!([mp.base().name(t.q), t.n, t.phase.tag()])
}

pub fn mprime_json(mp: &TransducerPrime) -> Value {
    let m = mp.base();
    let states: Vec<Value> = (0..mp.num_states()).map(|s| typed(mp, s)).collect();
    let transitions: Vec<Value> = mp
        .transitions()
        .iter()
        .map(|t| {
            json!({
                "from": typed(mp, t.from),
                "bit": t.bit,
                "to": typed(mp, t.to),
                "rule": t.rule.to_string(),
                "output": m.transitions()[t.origin].output.render(m.alphabet()),
            })
        })
        .collect();
    json!({
        "period": mp.period(),
        "mprime": {
            "states": states,
            "initial": mp.initial().map(|s| typed(mp, s)),
            "finals": mp.finals().map(|s| typed(mp, s)).collect::<Vec<_>>(),
            "transitions": transitions,
            "accepts_empty_input": mp.accepts_empty_input(),
        }
    })
}

fn witness_json(w: &Witness, a: &OrderedAlphabet) -> Value {
    json!({
        "x": a.render(&w.x),
        "y": a.render(&w.y),
        "family": w.family(a),
        "context": w.context,
    })
}

fn profile_json(p: &Option<CycleProfile>) -> Value {
    match p {
        None => Value::Null,
        Some(p) => json!({
            "has_zero": p.has_zero,
            "has_positive": p.has_positive,
            "has_negative": p.has_negative,
            "max_mean": p.max_mean.to_string(),
            "min_mean": p.min_mean.to_string(),
        }),
    }
}

fn certificate_json(mp: &TransducerPrime, c: &RootCertificate) -> Value {
    let a = mp.base().alphabet();
    let roots: Vec<Value> = c
        .roots
        .iter()
        .map(|(s, r)| json!({ "state": typed(mp, *s), "root": r.as_ref().map(|w| a.render(w)) }))
        .collect();
    let bound = match c.scope {
        Scope::Full => Value::Null,
        Scope::ZeroOnly { bound } => json!(bound),
    };
    json!({ "roots": roots, "weight_bound": bound, "evidence": c.evidence })
}

pub fn components_json(mp: &TransducerPrime, cond: &Condensation, profiles: &[Option<CycleProfile>], verdicts: &[ComponentVerdict]) -> Value {
    let a = mp.base().alphabet();
    let list: Vec<Value> = cond
        .sccs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut v = json!({
                "members": c.members.iter().map(|&s| typed(mp, s)).collect::<Vec<_>>(),
                "phase": c.phase.tag(),
                "trivial": c.trivial,
                "height": c.height,
                "profile": profile_json(&profiles[i]),
                "verdict": verdicts[i].kind(),
            });
            match &verdicts[i] {
                ComponentVerdict::FullyCertified(cert) | ComponentVerdict::ZeroCertified(cert) => {
                    v["certificate"] = certificate_json(mp, cert);
                }
                ComponentVerdict::QuasiDenseWitness { state, x, y } => {
                    v["witness"] = json!({ "state": typed(mp, *state), "x": a.render(x), "y": a.render(y) });
                }
            }
            v
        })
        .collect();
    Value::Array(list)
}

pub fn verdict_json(v: &RankVerdict, a: &OrderedAlphabet) -> Value {
    match v {
        RankVerdict::Bound(b) => json!({
            "bound": b.value.to_string(),
            "status": b.status.tag(),
            "derivation": b.derivation,
            "witness": Value::Null,
        }),
        RankVerdict::NotScattered(w) => json!({
            "bound": Value::Null,
            "status": "not_scattered",
            "derivation": [],
            "witness": witness_json(w, a),
        }),
        RankVerdict::Unknown(d) => json!({
            "bound": Value::Null,
            "status": "unknown",
            "derivation": [d],
            "witness": Value::Null,
        }),
    }
}

/// Full rank report for a single machine.
pub fn analysis_json(an: &Analysis) -> Value {
    let mut v = verdict_json(&an.verdict, an.machine.alphabet());
    v["components"] = components_json(&an.mprime, &an.condensation, &an.profiles, &an.verdicts);
    v["period"] = json!(an.report.period);
    v
}

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn dot_machine(m: &Transducer) -> String {
    let mut out = String::from("digraph M {\n  rankdir=LR;\n");
    for q in 0..m.num_states() {
        let shape = if m.is_final(q) { "doublecircle" } else { "circle" };
        let extra = if q == m.initial() { ", style=bold" } else { "" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}{extra}];", esc(m.name(q)));
    }
    for t in m.transitions() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{} / {}\"];",
            esc(m.name(t.from)),
            esc(m.name(t.to)),
            t.bit,
            esc(&t.output.render(m.alphabet()))
        );
    }
    out.push_str("}\n");
    out
}

pub fn dot_prime(mp: &TransducerPrime) -> String {
    let m = mp.base();
    let mut out = String::from("digraph Mprime {\n  rankdir=LR;\n");
    for s in 0..mp.num_states() {
        let shape = if mp.is_final(s) { "doublecircle" } else { "circle" };
        let extra = if Some(s) == mp.initial() { ", style=bold" } else { "" };
        let _ = writeln!(out, "  \"{}\" [shape={shape}{extra}];", esc(&mp.label(s)));
    }
    for t in mp.transitions() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{} / {} ({})\"];",
            esc(&mp.label(t.from)),
            esc(&mp.label(t.to)),
            t.bit,
            esc(&m.transitions()[t.origin].output.render(m.alphabet())),
            t.rule
        );
    }
    out.push_str("}\n");
    out
}
