//! Expected values of the FL case, written out by hand.

use std::collections::BTreeSet;

use gramconv::converge::{Footprint, Name, Strength};
use gramconv::grammar::{Expression as X, Production};

pub fn n(s: &str) -> X {
    X::n(s)
}

pub fn p(lhs: &str, rhs: X) -> Production {
    Production::new(lhs, rhs)
}

/// The JAXB grammar after normalization, written out by hand.
pub fn jaxb_anf() -> Vec<Production> {
    vec![
        p("Expr", n("Expr_1")),
        p("Expr", X::ValueStr),
        p("Expr", n("Expr_2")),
        p("Expr", n("Expr_3")),
        p("Expr", X::ValueInt),
        p("Function", X::seq([X::ValueStr, X::star(X::ValueStr), n("Expr")])),
        p("Program", X::star(n("Function"))),
        p("Expr_1", X::seq([X::ValueStr, X::star(n("Expr"))])),
        p("Expr_2", X::seq([n("Ops"), n("Expr"), n("Expr")])),
        p("Expr_3", X::seq([n("Expr"), n("Expr"), n("Expr")])),
    ]
}

pub fn sig(entries: &[(&str, &str)]) -> Vec<(String, Footprint)> {
    entries.iter().map(|(n, f)| (n.to_string(), Footprint::parse(f).unwrap())).collect()
}

/// Signatures of the master productions, in order.
pub fn master_prodsigs() -> Vec<(&'static str, Vec<(String, Footprint)>)> {
    vec![
        ("program", sig(&[("function", "+")])),
        ("function", sig(&[("expr", "1"), ("str", "1+")])),
        ("expr", sig(&[("str", "1")])),
        ("expr", sig(&[("int", "1")])),
        ("expr", sig(&[("apply", "1")])),
        ("expr", sig(&[("binary", "1")])),
        ("expr", sig(&[("cond", "1")])),
        ("apply", sig(&[("expr", "+"), ("str", "1")])),
        ("binary", sig(&[("expr", "11"), ("operator", "1")])),
        ("cond", sig(&[("expr", "111")])),
    ]
}

/// Rows of the match table: servant rule, master rule, strength.
pub fn match_table() -> Vec<(Production, Production, Strength)> {
    use Strength::*;
    vec![
        (p("Expr", n("Expr_1")), p("expression", n("apply")), Strong),
        (p("Expr", X::ValueStr), p("expression", X::ValueStr), Strong),
        (p("Expr", n("Expr_2")), p("expression", n("binary")), Strong),
        (p("Expr", n("Expr_3")), p("expression", n("conditional")), Strong),
        (p("Expr", X::ValueInt), p("expression", X::ValueInt), Strong),
        (
            p("Function", X::seq([X::ValueStr, X::star(X::ValueStr), n("Expr")])),
            p("function", X::seq([X::ValueStr, X::plus(X::ValueStr), n("expression")])),
            Weak,
        ),
        (p("Program", X::star(n("Function"))), p("program", X::plus(n("function"))), Weak),
        (
            p("Expr_1", X::seq([X::ValueStr, X::star(n("Expr"))])),
            p("apply", X::seq([X::ValueStr, X::plus(n("expression"))])),
            Weak,
        ),
        (
            p("Expr_2", X::seq([n("Ops"), n("Expr"), n("Expr")])),
            p("binary", X::seq([n("expression"), n("operator"), n("expression")])),
            Weak,
        ),
        (
            p("Expr_3", X::seq([n("Expr"), n("Expr"), n("Expr")])),
            p("conditional", X::seq([n("expression"), n("expression"), n("expression")])),
            Strong,
        ),
    ]
}

/// The expected servant to master mapping.
pub fn published_mapping() -> BTreeSet<(Name, Name)> {
    [
        ("Expr_2", "binary"),
        ("Expr_3", "conditional"),
        ("int", "int"),
        ("Function", "function"),
        ("str", "str"),
        ("Program", "program"),
        ("Expr", "expression"),
        ("Expr_1", "apply"),
        ("Ops", "operator"),
    ]
    .into_iter()
    .map(|(a, b)| (Name::from(a), Name::from(b)))
    .collect()
}
