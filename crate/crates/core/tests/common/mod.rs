#![allow(dead_code)]

use std::path::PathBuf;

use ocrank::fixture::{load_expr, load_fixture, FixtureBody};
use ocrank::rank::RocExpr;
use ocrank::transducer::Transducer;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.oct"))
}

pub fn machine(name: &str) -> Transducer {
    match load_fixture(&fixture_path(name)).expect("fixture loads").body {
        FixtureBody::Machine(m) => m,
        FixtureBody::Expr(_) => panic!("{name} is an expression"),
    }
}

pub fn expr(name: &str) -> RocExpr {
    load_expr(&fixture_path(name)).expect("expression loads")
}

pub const MACHINES: [&str; 2] = ["fig1", "fig2"];
