//! Line-oriented fixture files describing a transducer or an expression
//! over other fixture files.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet a b c
//! states q0 qf
//! initial q0
//! final qf
//! trans q0 0 q0 c
//! trans q0 1 qf b*a
//! ```
//!
//! Expression files hold a single line: `expr atom <file>`,
//! `expr concat <f1> <f2>` or `expr plus <f>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::rank::RocExpr;
use crate::regular::{parse_regex, Automaton};
use crate::transducer::{Transducer, Transition};
use crate::words::OrderedAlphabet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprSpec {
    Atom(String),
    Concat(String, String),
    Plus(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixtureBody {
    Machine(Transducer),
    Expr(ExprSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub body: FixtureBody,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Fixture { line, msg: msg.into() }
}

fn lookup(states: &Option<Vec<String>>, ln: usize, s: &str) -> Result<usize> {
    let st = states.as_ref().ok_or_else(|| err(ln, "'states' must come first"))?;
    st.iter().position(|x| x == s).ok_or_else(|| err(ln, format!("unknown state '{s}'")))
}

pub fn parse_fixture(text: &str, name: &str) -> Result<Fixture> {
    let mut alphabet: Option<OrderedAlphabet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial: Option<usize> = None;
    let mut finals: Option<Vec<usize>> = None;
    let mut trans: Vec<Transition> = Vec::new();
    let mut expr: Option<(usize, ExprSpec)> = None;
    let mut machine_line: Option<usize> = None;
    let last_line = text.lines().count() + 1;

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let words: Vec<&str> = rest.split_whitespace().collect();
        if kw != "expr" {
            machine_line.get_or_insert(ln);
        }
        match kw {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(err(ln, "duplicate 'alphabet' line"));
                }
                let mut letters = Vec::new();
                for w in &words {
                    let mut cs = w.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => letters.push(c),
                        _ => return Err(err(ln, format!("letter '{w}' is not a single character"))),
                    }
                }
                if letters.iter().any(|c| matches!(c, '(' | ')' | '+' | '*' | '#')) {
                    return Err(err(ln, "letters may not be regex operators"));
                }
                alphabet = Some(OrderedAlphabet::new(letters).map_err(|e| err(ln, e.to_string()))?);
            }
            "states" => {
                if states.is_some() {
                    return Err(err(ln, "duplicate 'states' line"));
                }
                let list: Vec<String> = words.iter().map(|s| s.to_string()).collect();
                if list.is_empty() {
                    return Err(err(ln, "no states declared"));
                }
                for (j, s) in list.iter().enumerate() {
                    if list[..j].contains(s) {
                        return Err(err(ln, format!("duplicate state '{s}'")));
                    }
                }
                states = Some(list);
            }
            "initial" => {
                if initial.is_some() {
                    return Err(err(ln, "duplicate 'initial' line"));
                }
                let [q] = words.as_slice() else {
                    return Err(err(ln, "'initial' takes exactly one state"));
                };
                initial = Some(lookup(&states, ln, q)?);
            }
            "final" => {
                if finals.is_some() {
                    return Err(err(ln, "duplicate 'final' line"));
                }
                finals = Some(words.iter().map(|q| lookup(&states, ln, q)).collect::<Result<_>>()?);
            }
            "trans" => {
                let parts: Vec<&str> = rest.splitn(4, char::is_whitespace).collect();
                let parts: Vec<&str> = parts.iter().map(|s| s.trim()).collect();
                if parts.len() < 4 || parts[3].is_empty() {
                    return Err(err(ln, "expected 'trans <p> <0|1> <q> <regex>'"));
                }
                let from = lookup(&states, ln, parts[0])?;
                let bit = match parts[1] {
                    "0" => 0,
                    "1" => 1,
                    b => return Err(err(ln, format!("input '{b}' is not 0 or 1"))),
                };
                let to = lookup(&states, ln, parts[2])?;
                let a = alphabet.as_ref().ok_or_else(|| err(ln, "'alphabet' must come before transitions"))?;
                let output = parse_regex(parts[3], a).map_err(|e| err(ln, e.to_string()))?;
                if Automaton::from_regex(&output, a.len()).is_empty() {
                    return Err(err(ln, "output denotes the empty language"));
                }
                if trans.iter().any(|t| t.from == from && t.bit == bit && t.to == to) {
                    return Err(err(ln, format!("duplicate transition {} {bit} {}", parts[0], parts[2])));
                }
                trans.push(Transition { from, bit, to, output });
            }
            "expr" => {
                if expr.is_some() {
                    return Err(err(ln, "duplicate 'expr' line"));
                }
                let spec = match words.as_slice() {
                    ["atom", f] => ExprSpec::Atom(f.to_string()),
                    ["concat", f, g] => ExprSpec::Concat(f.to_string(), g.to_string()),
                    ["plus", f] => ExprSpec::Plus(f.to_string()),
                    _ => return Err(err(ln, "expected 'expr atom <f>', 'expr concat <f> <g>' or 'expr plus <f>'")),
                };
                expr = Some((ln, spec));
            }
            other => return Err(err(ln, format!("unknown keyword '{other}'"))),
        }
    }

    if let Some((ln, spec)) = expr {
        if let Some(m) = machine_line {
            return Err(err(m.max(ln), "expression files cannot declare a machine"));
        }
        return Ok(Fixture {
            name: name.to_string(),
            body: FixtureBody::Expr(spec),
        });
    }
    let alphabet = alphabet.ok_or_else(|| err(last_line, "missing 'alphabet' line"))?;
    let states = states.ok_or_else(|| err(last_line, "missing 'states' line"))?;
    let initial = initial.ok_or_else(|| err(last_line, "missing 'initial' line"))?;
    let finals = finals.ok_or_else(|| err(last_line, "missing 'final' line"))?;
    let m = Transducer::new(alphabet, states, initial, finals, trans).map_err(|e| err(last_line, e.to_string()))?;
    Ok(Fixture {
        name: name.to_string(),
        body: FixtureBody::Machine(m),
    })
}

pub fn render_fixture(f: &Fixture) -> String {
    let mut out = String::new();
    match &f.body {
        FixtureBody::Expr(spec) => {
            let _ = match spec {
                ExprSpec::Atom(a) => writeln!(out, "expr atom {a}"),
                ExprSpec::Concat(a, b) => writeln!(out, "expr concat {a} {b}"),
                ExprSpec::Plus(a) => writeln!(out, "expr plus {a}"),
            };
        }
        FixtureBody::Machine(m) => {
            let letters: Vec<String> = m.alphabet().letters().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "alphabet {}", letters.join(" "));
            let _ = writeln!(out, "states {}", m.names().join(" "));
            let _ = writeln!(out, "initial {}", m.name(m.initial()));
            let finals: Vec<&str> = m.finals().map(|q| m.name(q)).collect();
            let _ = writeln!(out, "final {}", finals.join(" "));
            for t in m.transitions() {
                let _ = writeln!(
                    out,
                    "trans {} {} {} {}",
                    m.name(t.from),
                    t.bit,
                    m.name(t.to),
                    t.output.render(m.alphabet())
                );
            }
        }
    }
    out
}

/// Resolves `name` against `dir`, appending `.oct` when no such file exists.
pub fn resolve(dir: &Path, name: &str) -> PathBuf {
    let direct = dir.join(name);
    if direct.is_file() {
        direct
    } else {
        dir.join(format!("{name}.oct"))
    }
}

pub fn load_fixture(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture");
    parse_fixture(&text, name)
}

const MAX_NESTING: usize = 32;

/// Loads a fixture as an expression; machine files become atoms.
pub fn load_expr(path: &Path) -> Result<RocExpr> {
    load_expr_at(path, 0)
}

fn load_expr_at(path: &Path, depth: usize) -> Result<RocExpr> {
    if depth > MAX_NESTING {
        return Err(Error::Input(format!("expression nesting too deep at {}", path.display())));
    }
    let f = load_fixture(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let sub = |n: &str| load_expr_at(&resolve(dir, n), depth + 1);
    Ok(match f.body {
        FixtureBody::Machine(m) => RocExpr::atom(m),
        FixtureBody::Expr(ExprSpec::Atom(a)) => sub(&a)?,
        FixtureBody::Expr(ExprSpec::Concat(a, b)) => {
            let (x, y) = (sub(&a)?, sub(&b)?);
            if x.alphabet() != y.alphabet() {
                return Err(Error::Input(format!("'{a}' and '{b}' declare different alphabets")));
            }
            RocExpr::concat(x, y)
        }
        FixtureBody::Expr(ExprSpec::Plus(a)) => RocExpr::plus(sub(&a)?),
    })
}
