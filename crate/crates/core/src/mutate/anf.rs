//! Abstract Normal Form conditions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::grammar::{Expression, Grammar};

/// One violated ANF condition (numbered 1–9) and the offending element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnfViolation {
    pub condition: u8,
    pub element: String,
}

impl fmt::Display for AnfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            1 => "labelled production",
            2 => "named subexpression",
            3 => "terminal symbol",
            4 => "inner choice",
            5 => "horizontal production",
            6 => "separator list",
            7 => "trivially defined nonterminal",
            8 => "mixing chain and non-chain rules",
            _ => "disconnected call graph",
        };
        write!(f, "condition {}: {what}: {}", self.condition, self.element)
    }
}

/// The roots an ANF grammar is expected to declare: the tops that are not
/// leaves, else all tops, else whatever is declared now.
pub fn expected_roots(g: &Grammar) -> Vec<String> {
    let tops = g.tops();
    let ordered: Vec<String> = g.defined_in_order().into_iter().filter(|n| tops.contains(n)).collect();
    let non_leaf: Vec<String> = ordered.iter().filter(|n| !g.is_leaf(n)).cloned().collect();
    if !non_leaf.is_empty() {
        non_leaf
    } else if !ordered.is_empty() {
        ordered
    } else {
        g.roots.clone()
    }
}

fn nested_choice(e: &Expression) -> bool {
    e.children().into_iter().any(|c| c.any_node(&|x| matches!(x, Expression::Choice(_))))
}

pub fn anf_check(g: &Grammar) -> Vec<AnfViolation> {
    let mut out = Vec::new();
    let mut v = |condition: u8, element: String| out.push(AnfViolation { condition, element });
    for p in &g.productions {
        if let Some(l) = &p.label {
            v(1, format!("[{l}] {}", p.lhs));
        }
    }
    let checks: [(u8, fn(&Expression) -> bool); 3] = [
        (2, |x| matches!(x, Expression::Selectable(..))),
        (3, |x| matches!(x, Expression::Terminal(_))),
        (6, |x| matches!(x, Expression::SepListStar(..) | Expression::SepListPlus(..))),
    ];
    for (cond, pred) in checks {
        for p in &g.productions {
            if p.rhs.any_node(&pred) {
                v(cond, p.to_string());
            }
        }
    }
    for p in &g.productions {
        if nested_choice(&p.rhs) {
            v(4, p.to_string());
        }
        if matches!(p.rhs, Expression::Choice(_)) {
            v(5, p.to_string());
        }
    }
    let roots: BTreeSet<&String> = g.roots.iter().collect();
    for n in g.defined_in_order() {
        let rules: Vec<_> = g.rules_of(&n).collect();
        if rules.len() == 1
            && !roots.contains(&n)
            && matches!(rules[0].rhs, Expression::Epsilon | Expression::Empty | Expression::Any)
        {
            v(7, n.clone());
        }
        let chains = rules.iter().filter(|p| p.is_chain()).count();
        if chains > 0 && chains < rules.len() {
            v(8, n.clone());
        }
    }
    let reach = g.reachable(&g.start_symbols());
    for n in g.defined_in_order() {
        if !reach.contains(&n) {
            v(9, format!("{n} is unreachable"));
        }
    }
    if !g.roots.is_empty() {
        let declared: BTreeSet<String> = g.roots.iter().cloned().collect();
        let expected: BTreeSet<String> = expected_roots(g).into_iter().collect();
        if declared != expected {
            let e: Vec<_> = expected.into_iter().collect();
            v(9, format!("roots should be {}", e.join(", ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Expression as X, Production};

    #[test]
    fn terminal_violates_condition_3() {
        let g = Grammar::new(vec![], vec![Production::new("a", X::seq([X::t("x"), X::n("b")]))]);
        let conds: Vec<u8> = anf_check(&g).iter().map(|v| v.condition).collect();
        assert_eq!(conds, vec![3]);
    }

    #[test]
    fn mixing_chain_and_non_chain() {
        let g = Grammar::new(
            vec![],
            vec![Production::new("a", X::n("b")), Production::new("a", X::seq([X::n("c"), X::n("d")]))],
        );
        let conds: Vec<u8> = anf_check(&g).iter().map(|v| v.condition).collect();
        assert_eq!(conds, vec![8]);
    }

    #[test]
    fn inner_choice_and_horizontal() {
        let g = Grammar::new(
            vec![],
            vec![
                Production::new("a", X::seq([X::choice([X::n("b"), X::n("c")]), X::n("d")])),
                Production::new("e", X::choice([X::n("a"), X::n("b")])),
            ],
        );
        let conds: Vec<u8> = anf_check(&g).iter().map(|v| v.condition).collect();
        assert_eq!(conds, vec![4, 5]);
    }

    #[test]
    fn trivial_definition_and_disconnection() {
        let g = Grammar::new(
            vec!["a".into()],
            vec![Production::new("a", X::n("b")), Production::new("b", X::Epsilon), Production::new("z", X::n("b"))],
        );
        let conds: Vec<u8> = anf_check(&g).iter().map(|v| v.condition).collect();
        assert_eq!(conds, vec![7, 9, 9]);
    }
}
