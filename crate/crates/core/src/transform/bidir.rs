use crate::grammar::{Expression, Grammar};

use super::ops::{chain_user, occurrences, yacc_match, yacc_split};
use super::{Step, TransformError};

/// A forward step and the step that undoes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BidirectionalStep {
    pub forward: Step,
    pub backward: Step,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BidirError {
    #[error("operator `{0}` has no inverse")]
    Unsupported(&'static str),
    #[error("{op} is not invertible here: {reason}")]
    NotInvertible { op: &'static str, reason: String },
    #[error(transparent)]
    Forward(#[from] TransformError),
}

/// Pair `step` with its inverse for input grammar `g`.
///
/// The inverse of several operators depends on the input (`inline` needs the
/// body it removes, `deyaccify` the recursion style it removes), hence the
/// grammar argument. Steps outside the bijective domain of their operator
/// are rejected with [`BidirError::NotInvertible`].
pub fn bidirectionalize(step: &Step, g: &Grammar) -> Result<BidirectionalStep, BidirError> {
    if !step.has_inverse() {
        return Err(BidirError::Unsupported(step.op_name()));
    }
    let out = step.apply(g)?;
    let op = step.op_name();
    let refuse = |reason: String| Err(BidirError::NotInvertible { op, reason });
    let backward = match step {
        Step::Rename { from, to } => Step::Rename { from: to.clone(), to: from.clone() },
        Step::Extract { name, .. } => Step::Inline { name: name.clone() },
        Step::Inline { name } => {
            let i = g.rule_indices(name)[0];
            let rule = &g.productions[i];
            if rule.label.is_some() {
                return refuse(format!("the rule of `{name}` is labelled"));
            }
            if g.use_count(name) == 0 {
                return refuse(format!("`{name}` is unused"));
            }
            if flattens_at_uses(g, name, &rule.rhs) {
                return refuse("the body would merge into its context".into());
            }
            let elsewhere: usize = g
                .productions
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| occurrences(&p.rhs, &rule.rhs, true))
                .sum();
            if elsewhere > 0 {
                return refuse("the body also occurs elsewhere".into());
            }
            Step::Extract { name: name.clone(), expr: rule.rhs.clone() }
        }
        Step::Chain { name, .. } => Step::Unchain { name: name.clone() },
        Step::Unchain { name } => {
            let i = g.rule_indices(name)[0];
            let rule = &g.productions[i];
            if rule.label.is_some() {
                return refuse(format!("the rule of `{name}` is labelled"));
            }
            let u = chain_user(g, name).expect("unchain succeeded");
            let user = &g.productions[u].lhs;
            if g.rules_of(user).any(|p| p.rhs == rule.rhs) {
                return refuse(format!("`{user}` already has a rule {}", rule.rhs));
            }
            Step::Chain { lhs: user.clone(), rhs: rule.rhs.clone(), name: name.clone() }
        }
        Step::Vertical { name } => Step::Horizontal { name: name.clone() },
        Step::Horizontal { name } => {
            let clash = g.rules_of(name).any(|p| {
                p.label.is_none() && matches!(p.rhs, Expression::Choice(_) | Expression::Selectable(..))
            });
            if clash {
                return refuse(format!("an unlabelled rule of `{name}` is a choice or selectable"));
            }
            Step::Vertical { name: name.clone() }
        }
        Step::Factor { name, from, to } => {
            if g.rules_of(name).any(|p| occurrences(&p.rhs, to, false) > 0) {
                return refuse(format!("{to} already occurs in `{name}`"));
            }
            if g.rules_of(name).any(|p| merges_at(&p.rhs, from, to)) {
                return refuse(format!("{to} would merge into its context"));
            }
            Step::Factor { name: name.clone(), from: to.clone(), to: from.clone() }
        }
        Step::Distribute { name } => {
            let before = g.rules_of(name).next().unwrap().rhs.clone();
            let after = out.rules_of(name).next().unwrap().rhs.clone();
            Step::Factor { name: name.clone(), from: after, to: before }
        }
        Step::Deyaccify { name } => {
            let (_, _, style) = yacc_match(g, name).expect("deyaccify succeeded");
            Step::Yaccify { name: name.clone(), style }
        }
        Step::Yaccify { name, style } => {
            let rhs = &g.rules_of(name).next().unwrap().rhs;
            let (base, unit) = yacc_split(name, rhs, *style).expect("yaccify succeeded");
            if !matches!(rhs, Expression::Plus(_)) && base == unit {
                return refuse("base and step coincide".into());
            }
            Step::Deyaccify { name: name.clone() }
        }
        _ => unreachable!("auxiliary operators were rejected above"),
    };
    Ok(BidirectionalStep { forward: step.clone(), backward })
}

/// Whether substituting `body` for `name` would flatten into a same-kind
/// parent.
fn flattens_at_uses(g: &Grammar, name: &str, body: &Expression) -> bool {
    let target = Expression::n(name);
    g.productions.iter().any(|p| merges_at(&p.rhs, &target, body))
}

/// Whether replacing node occurrences of `at` in `x` by `with` would merge
/// `with` into a same-kind sequence or choice parent.
fn merges_at(x: &Expression, at: &Expression, with: &Expression) -> bool {
    let kind = |e: &Expression| match e {
        Expression::Sequence(_) => 1,
        Expression::Choice(_) => 2,
        _ => 0,
    };
    let k = kind(with);
    if k == 0 {
        return false;
    }
    let mut found = false;
    x.walk(&mut |node| {
        if kind(node) == k && node.children().into_iter().any(|c| c == at) {
            found = true;
        }
    });
    found
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("step {index}: {source}")]
pub struct InvertError {
    /// 1-based position of the step that could not be inverted.
    pub index: usize,
    pub source: BidirError,
}

/// The script that undoes `steps` on `g`: the backward steps in reverse
/// order.
pub fn invert_script(g: &Grammar, steps: &[Step]) -> Result<Vec<Step>, InvertError> {
    let mut cur = g.clone();
    let mut back = Vec::with_capacity(steps.len());
    for (i, s) in steps.iter().enumerate() {
        let pair = bidirectionalize(s, &cur).map_err(|source| InvertError { index: i + 1, source })?;
        cur = s.apply(&cur).expect("bidirectionalize already applied this step");
        back.push(pair.backward);
    }
    back.reverse();
    Ok(back)
}
