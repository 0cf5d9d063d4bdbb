use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use ocrank::check::{run_checks, CheckLimits};
use ocrank::counterset::{reach_sets, reach_sets_with_cap, NSetReport};
use ocrank::fixture::{load_expr, load_fixture, FixtureBody};
use ocrank::harness::{enumerate, enumerate_expr};
use ocrank::rank::{analyse, expr_rank_bound, RankVerdict, RocExpr, SearchCaps};
use ocrank::report;
use ocrank::transducer::{build_mprime, Transducer};
use ocrank::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_SCATTERED: u8 = 2;
const EXIT_UNKNOWN: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Counter sets per state, the period and the types.
    Nsets,
    /// The depth-typed machine as JSON.
    Mprime,
    /// Graphviz rendering of the machine (or of M' with --prime).
    Dot,
    /// Rank bound or verdict as JSON.
    Rank,
    /// Members in lexicographic order, one per line.
    Enumerate,
    /// Invariant suite on the fixture.
    Check,
}

/// Hausdorff rank bounds for lexicographically ordered one-counter languages.
#[derive(Debug, Parser)]
#[command(name = "ocrank", version)]
struct Cli {
    command: Command,
    /// Fixture file (a machine or an expression).
    fixture: PathBuf,
    #[arg(long, default_value_t = 8)]
    input_cap: usize,
    #[arg(long, default_value_t = 12)]
    output_cap: usize,
    /// Counter cap for counter-set certification (default: derived from the state count).
    #[arg(long)]
    counter_cap: Option<u64>,
    /// Also write the JSON report to this file.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Also write a DOT rendering to this file.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// With `dot`, render M' instead of the machine.
    #[arg(long)]
    prime: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Certification { .. } | Error::Inconsistency(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

fn machine_of(path: &Path) -> Result<Transducer, Failure> {
    match load_fixture(path)?.body {
        FixtureBody::Machine(m) => Ok(m),
        FixtureBody::Expr(_) => Err(fail(EXIT_USAGE, format!("{} is an expression; this command needs a machine", path.display()))),
    }
}

fn nsets_of(m: &Transducer, cap: Option<u64>) -> Result<NSetReport, Failure> {
    Ok(match cap {
        Some(c) => reach_sets_with_cap(m, c)?,
        None => reach_sets(m)?,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn emit_json(cli: &Cli, v: &Value, stdout: bool) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    if stdout {
        println!("{text}");
    }
    if let Some(p) = &cli.json {
        write_file(p, &format!("{text}\n"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let caps = SearchCaps {
        input_cap: cli.input_cap,
        output_cap: cli.output_cap,
    };
    match cli.command {
        Command::Nsets => {
            let m = machine_of(&cli.fixture)?;
            let r = nsets_of(&m, cli.counter_cap)?;
            print!("{}", report::nsets_table(&m, &r));
            emit_json(cli, &report::nsets_json(&m, &r), false)?;
            if let Some(p) = &cli.dot {
                write_file(p, &report::dot_machine(&m))?;
            }
        }
        Command::Mprime => {
            let m = machine_of(&cli.fixture)?;
            let r = nsets_of(&m, cli.counter_cap)?;
            let mp = build_mprime(&m, &r)?;
            emit_json(cli, &report::mprime_json(&mp), true)?;
            if let Some(p) = &cli.dot {
                write_file(p, &report::dot_prime(&mp))?;
            }
        }
        Command::Dot => {
            let m = machine_of(&cli.fixture)?;
            let dot = if cli.prime {
                let r = nsets_of(&m, cli.counter_cap)?;
                report::dot_prime(&build_mprime(&m, &r)?)
            } else {
                report::dot_machine(&m)
            };
            print!("{dot}");
            if let Some(p) = &cli.dot {
                write_file(p, &dot)?;
            }
        }
        Command::Rank => {
            let (verdict, v) = match load_fixture(&cli.fixture)?.body {
                FixtureBody::Machine(m) => {
                    let an = analyse(&m, cli.counter_cap)?;
                    if let Some(p) = &cli.dot {
                        write_file(p, &report::dot_prime(&an.mprime))?;
                    }
                    let v = report::analysis_json(&an);
                    (an.verdict, v)
                }
                FixtureBody::Expr(_) => {
                    let e = load_expr(&cli.fixture)?;
                    let verdict = expr_rank_bound(&e, caps)?;
                    let v = report::verdict_json(&verdict, e.alphabet());
                    (verdict, v)
                }
            };
            emit_json(cli, &v, true)?;
            return Ok(match verdict {
                RankVerdict::Bound(_) => 0,
                RankVerdict::NotScattered(_) => EXIT_NOT_SCATTERED,
                RankVerdict::Unknown(_) => EXIT_UNKNOWN,
            });
        }
        Command::Enumerate => {
            let e = match load_fixture(&cli.fixture)?.body {
                FixtureBody::Machine(m) => RocExpr::atom(m),
                FixtureBody::Expr(_) => load_expr(&cli.fixture)?,
            };
            let res = match &e {
                RocExpr::Atom(m) => enumerate(m, cli.input_cap, cli.output_cap),
                _ => enumerate_expr(&e, cli.input_cap, cli.output_cap)?,
            };
            let a = e.alphabet();
            let mut out = std::io::stdout().lock();
            for w in &res.words {
                let _ = writeln!(out, "{}", a.render(w));
            }
            let words: Vec<String> = res.words.iter().map(|w| a.render(w)).collect();
            emit_json(cli, &json!(words), false)?;
            if res.truncated {
                eprintln!("note: some outputs exceed the output cap {}", cli.output_cap);
            }
        }
        Command::Check => {
            let m = machine_of(&cli.fixture)?;
            let limits = CheckLimits {
                counter_cap: cli.counter_cap,
                ..CheckLimits::default()
            };
            let results = run_checks(&m, limits)?;
            let mut failed = false;
            for c in &results {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed |= !c.passed;
            }
            let v: Vec<Value> = results
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            emit_json(cli, &json!(v), false)?;
            if failed {
                return Ok(EXIT_INTERNAL);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("ocrank: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
