use crate::grammar::{Expression, Grammar, Production};

use super::{RecursionStyle, TransformError as E};

type Result<T> = std::result::Result<T, E>;

fn single_rule(g: &Grammar, name: &str) -> Result<usize> {
    let idx = g.rule_indices(name);
    match idx.len() {
        0 => Err(E::Undefined(name.to_string())),
        1 => Ok(idx[0]),
        found => Err(E::NotSingleRule { name: name.to_string(), found }),
    }
}

fn require_defined(g: &Grammar, name: &str) -> Result<()> {
    if g.is_defined(name) {
        Ok(())
    } else {
        Err(E::Undefined(name.to_string()))
    }
}

/// Replace occurrences of `pat` in `x` with `with`, top-down and left to
/// right. With `ranges`, contiguous runs of sequence (choice) children equal
/// to a sequence (choice) pattern also count as occurrences.
pub(crate) fn replace_expr(x: &Expression, pat: &Expression, with: &Expression, ranges: bool, count: &mut usize) -> Expression {
    if x == pat {
        *count += 1;
        return with.clone();
    }
    match (x, pat) {
        (Expression::Sequence(xs), Expression::Sequence(ps)) if ranges => {
            Expression::seq(replace_runs(xs, ps, pat, with, count))
        }
        (Expression::Choice(xs), Expression::Choice(ps)) if ranges => {
            Expression::choice(replace_runs(xs, ps, pat, with, count))
        }
        _ => {
            let kids = x.children().into_iter().map(|c| replace_expr(c, pat, with, ranges, count)).collect();
            x.with_children(kids)
        }
    }
}

fn replace_runs(xs: &[Expression], ps: &[Expression], pat: &Expression, with: &Expression, count: &mut usize) -> Vec<Expression> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        if i + ps.len() <= xs.len() && xs[i..i + ps.len()] == *ps {
            *count += 1;
            out.push(with.clone());
            i += ps.len();
        } else {
            out.push(replace_expr(&xs[i], pat, with, true, count));
            i += 1;
        }
    }
    out
}

/// Occurrences of `pat` in `x`, counted as [`replace_expr`] would replace them.
pub(crate) fn occurrences(x: &Expression, pat: &Expression, ranges: bool) -> usize {
    let mut k = 0;
    replace_expr(x, pat, pat, ranges, &mut k);
    k
}

/// Rewrite the right-hand sides of the rules of `name` (all rules when
/// `name` is `None`), replacing node occurrences of `from` by `to`.
fn replace_in_scope(g: &Grammar, name: Option<&str>, from: &Expression, to: &Expression) -> Result<Grammar> {
    let mut out = g.clone();
    let mut k = 0;
    for p in out.productions.iter_mut() {
        if name.is_none_or(|n| p.lhs == n) {
            p.rhs = replace_expr(&p.rhs, from, to, false, &mut k);
        }
    }
    if k == 0 {
        return Err(E::NoOccurrence(from.to_string()));
    }
    Ok(out)
}

pub fn rename(g: &Grammar, from: &str, to: &str) -> Result<Grammar> {
    let names = g.names();
    if !names.contains(from) {
        return Err(E::Absent(from.to_string()));
    }
    if names.contains(to) || to.is_empty() {
        return Err(E::NameInUse(to.to_string()));
    }
    let mut out = g.clone();
    for r in out.roots.iter_mut() {
        if r == from {
            *r = to.to_string();
        }
    }
    for p in out.productions.iter_mut() {
        if p.lhs == from {
            p.lhs = to.to_string();
        }
        p.rhs = p.rhs.rename_nonterminal(from, to);
    }
    Ok(out)
}

pub fn extract(g: &Grammar, name: &str, e: &Expression) -> Result<Grammar> {
    if g.names().contains(name) || name.is_empty() {
        return Err(E::NameInUse(name.to_string()));
    }
    let mut out = g.clone();
    let mut k = 0;
    let with = Expression::n(name);
    for p in out.productions.iter_mut() {
        p.rhs = replace_expr(&p.rhs, e, &with, true, &mut k);
    }
    if k == 0 {
        return Err(E::NoOccurrence(e.to_string()));
    }
    out.productions.push(Production::new(name, e.clone()));
    Ok(out)
}

pub fn inline(g: &Grammar, name: &str) -> Result<Grammar> {
    let i = single_rule(g, name)?;
    if g.roots.iter().any(|r| r == name) {
        return Err(E::IsRoot(name.to_string()));
    }
    let body = g.productions[i].rhs.clone();
    if body.mentions(name) {
        return Err(E::SelfReferential(name.to_string()));
    }
    let mut out = g.clone();
    out.productions.remove(i);
    for p in out.productions.iter_mut() {
        p.rhs = p.rhs.substitute(name, &body);
    }
    Ok(out)
}

pub fn chain(g: &Grammar, lhs: &str, rhs: &Expression, name: &str) -> Result<Grammar> {
    if g.names().contains(name) || name.is_empty() {
        return Err(E::NameInUse(name.to_string()));
    }
    let i = g
        .productions
        .iter()
        .position(|p| p.lhs == lhs && p.rhs == *rhs)
        .ok_or_else(|| E::NoSuchRule { lhs: lhs.to_string(), rhs: rhs.to_string() })?;
    let mut out = g.clone();
    out.productions[i].rhs = Expression::n(name);
    out.productions.push(Production::new(name, rhs.clone()));
    Ok(out)
}

/// The rule `x → name` that is the single use of `name`, if any.
pub(crate) fn chain_user(g: &Grammar, name: &str) -> Option<usize> {
    if g.use_count(name) != 1 {
        return None;
    }
    g.productions
        .iter()
        .position(|p| p.lhs != name && matches!(&p.rhs, Expression::Nonterminal(n) if n == name))
}

pub fn unchain(g: &Grammar, name: &str) -> Result<Grammar> {
    let i = single_rule(g, name)?;
    if g.roots.iter().any(|r| r == name) {
        return Err(E::IsRoot(name.to_string()));
    }
    let u = chain_user(g, name).ok_or_else(|| E::NotChainUse(name.to_string()))?;
    let mut out = g.clone();
    out.productions[u].rhs = g.productions[i].rhs.clone();
    out.productions.remove(i);
    Ok(out)
}

pub fn vertical(g: &Grammar, name: &str) -> Result<Grammar> {
    let i = single_rule(g, name)?;
    let p = &g.productions[i];
    let Expression::Choice(alts) = &p.rhs else {
        return Err(E::NotChoice(name.to_string()));
    };
    if p.label.is_some() {
        return Err(E::Labelled(name.to_string()));
    }
    let rules: Vec<Production> = alts
        .iter()
        .map(|a| match a {
            Expression::Selectable(s, b) => Production::labelled(s.clone(), name, (**b).clone()),
            other => Production::new(name, other.clone()),
        })
        .collect();
    let mut out = g.clone();
    out.productions.splice(i..=i, rules);
    Ok(out)
}

pub fn horizontal(g: &Grammar, name: &str) -> Result<Grammar> {
    let idx = g.rule_indices(name);
    if idx.is_empty() {
        return Err(E::Undefined(name.to_string()));
    }
    if idx.len() < 2 {
        return Err(E::TooFewRules(name.to_string()));
    }
    let alts: Vec<Expression> = idx
        .iter()
        .map(|&i| {
            let p = &g.productions[i];
            match &p.label {
                Some(l) => Expression::sel(l.clone(), p.rhs.clone()),
                None => p.rhs.clone(),
            }
        })
        .collect();
    let mut out = g.clone();
    out.productions[idx[0]] = Production::new(name, Expression::choice(alts));
    for &i in idx[1..].iter().rev() {
        out.productions.remove(i);
    }
    Ok(out)
}

/// Disjunctive normal form under distribution of sequence (and selectors)
/// over choice. Other constructors are treated as atoms.
pub fn dnf(e: &Expression) -> Vec<Expression> {
    match e {
        Expression::Choice(xs) => xs.iter().flat_map(dnf).collect(),
        Expression::Sequence(xs) => {
            let mut acc: Vec<Vec<Expression>> = vec![vec![]];
            for x in xs {
                let opts = dnf(x);
                let mut next = Vec::with_capacity(acc.len() * opts.len());
                for prefix in &acc {
                    for o in &opts {
                        let mut v = prefix.clone();
                        v.push(o.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc.into_iter().map(Expression::seq).collect()
        }
        Expression::Selectable(s, b) => dnf(b).into_iter().map(|x| Expression::sel(s.clone(), x)).collect(),
        other => vec![other.clone()],
    }
}

pub fn factor(g: &Grammar, name: &str, from: &Expression, to: &Expression) -> Result<Grammar> {
    require_defined(g, name)?;
    if from == to {
        return Err(E::IdenticalOperands);
    }
    if dnf(from) != dnf(to) {
        return Err(E::NotEquivalent { from: from.to_string(), to: to.to_string() });
    }
    replace_in_scope(g, Some(name), from, to)
}

pub fn distribute(g: &Grammar, name: &str) -> Result<Grammar> {
    let i = single_rule(g, name)?;
    let rhs = &g.productions[i].rhs;
    let new = Expression::choice(dnf(rhs));
    if new == *rhs {
        return Err(E::NoInnerChoice(name.to_string()));
    }
    let mut out = g.clone();
    out.productions[i].rhs = new;
    Ok(out)
}

/// Recognise a yaccified pair of rules for `a` and return its
/// deyaccified right-hand side together with the recursion style.
pub fn yacc_pattern(a: &str, r1: &Expression, r2: &Expression) -> Option<(Expression, RecursionStyle)> {
    for (base, step) in [(r1, r2), (r2, r1)] {
        if base.mentions(a) {
            continue;
        }
        let Expression::Sequence(parts) = step else { continue };
        let is_a = |e: &Expression| matches!(e, Expression::Nonterminal(n) if n == a);
        if is_a(&parts[0]) {
            let c = Expression::seq(parts[1..].iter().cloned());
            if !c.mentions(a) {
                let rhs = if c == *base {
                    Expression::plus(base.clone())
                } else {
                    Expression::seq([base.clone(), Expression::star(c)])
                };
                return Some((rhs, RecursionStyle::Left));
            }
        }
        if is_a(parts.last().unwrap()) {
            let c = Expression::seq(parts[..parts.len() - 1].iter().cloned());
            if !c.mentions(a) {
                let rhs = if c == *base {
                    Expression::plus(base.clone())
                } else {
                    Expression::seq([Expression::star(c), base.clone()])
                };
                return Some((rhs, RecursionStyle::Right));
            }
        }
    }
    None
}

pub(crate) fn yacc_match(g: &Grammar, name: &str) -> Option<(Vec<usize>, Expression, RecursionStyle)> {
    let idx = g.rule_indices(name);
    if idx.len() != 2 || idx.iter().any(|&i| g.productions[i].label.is_some()) {
        return None;
    }
    let (rhs, style) = yacc_pattern(name, &g.productions[idx[0]].rhs, &g.productions[idx[1]].rhs)?;
    Some((idx, rhs, style))
}

pub fn deyaccify(g: &Grammar, name: &str) -> Result<Grammar> {
    require_defined(g, name)?;
    let (idx, rhs, _) = yacc_match(g, name).ok_or_else(|| E::NotYaccified(name.to_string()))?;
    let mut out = g.clone();
    out.productions[idx[0]] = Production::new(name, rhs);
    out.productions.remove(idx[1]);
    Ok(out)
}

/// Base and step expressions of the yaccified form of `rhs`.
pub(crate) fn yacc_split(name: &str, rhs: &Expression, style: RecursionStyle) -> Option<(Expression, Expression)> {
    let (base, unit) = match (rhs, style) {
        (Expression::Plus(b), _) => ((**b).clone(), (**b).clone()),
        (Expression::Sequence(parts), RecursionStyle::Left) => match parts.last().unwrap() {
            Expression::Star(c) => (Expression::seq(parts[..parts.len() - 1].iter().cloned()), (**c).clone()),
            _ => return None,
        },
        (Expression::Sequence(parts), RecursionStyle::Right) => match &parts[0] {
            Expression::Star(c) => (Expression::seq(parts[1..].iter().cloned()), (**c).clone()),
            _ => return None,
        },
        _ => return None,
    };
    if base.mentions(name) || unit.mentions(name) {
        return None;
    }
    Some((base, unit))
}

pub fn yaccify(g: &Grammar, name: &str, style: RecursionStyle) -> Result<Grammar> {
    let i = single_rule(g, name)?;
    let p = &g.productions[i];
    if p.label.is_some() {
        return Err(E::Labelled(name.to_string()));
    }
    let (base, unit) =
        yacc_split(name, &p.rhs, style).ok_or_else(|| E::NotYaccifiable { name: name.to_string(), style })?;
    let a = Expression::n(name);
    let step = match style {
        RecursionStyle::Left => Expression::seq([a, unit]),
        RecursionStyle::Right => Expression::seq([unit, a]),
    };
    let mut out = g.clone();
    out.productions.splice(i..=i, [Production::new(name, base), Production::new(name, step)]);
    Ok(out)
}

pub fn unlabel(g: &Grammar, label: &str) -> Result<Grammar> {
    let mut out = g.clone();
    let mut hit = false;
    for p in out.productions.iter_mut() {
        if p.label.as_deref() == Some(label) {
            p.label = None;
            hit = true;
        }
    }
    if !hit {
        return Err(E::NoSuchLabel(label.to_string()));
    }
    Ok(out)
}

pub(crate) fn strip_selectors(e: &Expression) -> Expression {
    e.map_bottom_up(&mut |x| match x {
        Expression::Selectable(_, b) => *b,
        other => other,
    })
}

pub fn anonymize(g: &Grammar, name: &str) -> Result<Grammar> {
    require_defined(g, name)?;
    let mut out = g.clone();
    for p in out.productions.iter_mut().filter(|p| p.lhs == name) {
        p.rhs = strip_selectors(&p.rhs);
    }
    Ok(out)
}

/// Drop terminals and simplify the ε left behind: ε parts vanish from
/// sequences, repetitions and selectors of ε are ε, separator lists with an
/// ε separator become plain repetitions. Choices keep ε alternatives.
pub(crate) fn strip_terminals(e: &Expression) -> Expression {
    use Expression::*;
    e.map_bottom_up(&mut |x| match x {
        Terminal(_) => Epsilon,
        Sequence(xs) => Expression::seq(xs.into_iter().filter(|p| *p != Epsilon)),
        Optional(b) | Star(b) | Plus(b) if *b == Epsilon => Epsilon,
        Selectable(_, b) if *b == Epsilon => Epsilon,
        SepListStar(a, _) | SepListPlus(a, _) if *a == Epsilon => Epsilon,
        SepListStar(a, s) if *s == Epsilon => Star(a),
        SepListPlus(a, s) if *s == Epsilon => Plus(a),
        other => other,
    })
}

pub fn abstractize(g: &Grammar, name: &str) -> Result<Grammar> {
    require_defined(g, name)?;
    let mut out = g.clone();
    for p in out.productions.iter_mut().filter(|p| p.lhs == name) {
        p.rhs = strip_terminals(&p.rhs);
    }
    Ok(out)
}

/// The separator-list law applied left to right, if `e` is a separator list.
pub fn massage_law(e: &Expression) -> Option<Expression> {
    let unroll = |a: &Expression, s: &Expression| {
        Expression::seq([a.clone(), Expression::star(Expression::seq([s.clone(), a.clone()]))])
    };
    match e {
        Expression::SepListPlus(a, s) => Some(unroll(a, s)),
        Expression::SepListStar(a, s) => Some(Expression::opt(unroll(a, s))),
        _ => None,
    }
}

pub fn massage(g: &Grammar, name: &str, from: &Expression, to: &Expression) -> Result<Grammar> {
    require_defined(g, name)?;
    let lawful = massage_law(from).as_ref() == Some(to) || massage_law(to).as_ref() == Some(from);
    if !lawful {
        return Err(E::NotMassageLaw { from: from.to_string(), to: to.to_string() });
    }
    replace_in_scope(g, Some(name), from, to)
}

pub fn reroot(g: &Grammar, roots: &[String]) -> Result<Grammar> {
    let names = g.names();
    if let Some(r) = roots.iter().find(|r| !names.contains(*r)) {
        return Err(E::UnknownRoot(r.clone()));
    }
    let mut out = g.clone();
    out.roots = roots.to_vec();
    Ok(out)
}

pub fn eliminate(g: &Grammar, name: &str) -> Result<Grammar> {
    require_defined(g, name)?;
    let roots = g.roots.iter().cloned().collect();
    if g.reachable(&roots).contains(name) {
        if g.roots.iter().any(|r| r == name) {
            return Err(E::IsRoot(name.to_string()));
        }
        return Err(E::Reachable(name.to_string()));
    }
    let mut out = g.clone();
    out.productions.retain(|p| p.lhs != name);
    Ok(out)
}

fn list_adjust(g: &Grammar, op: &'static str, name: &str, from: &Expression, to: &Expression) -> Result<Grammar> {
    require_defined(g, name)?;
    let ok = match (op, from, to) {
        ("narrow", Expression::Star(a), Expression::Plus(b)) => a == b,
        ("widen", Expression::Plus(a), Expression::Star(b)) => a == b,
        _ => false,
    };
    if !ok {
        return Err(E::NotListAdjustment { op, from: from.to_string(), to: to.to_string() });
    }
    replace_in_scope(g, Some(name), from, to)
}

/// Rewrite `star(x)` to `plus(x)` in the rules of `name`.
pub fn narrow(g: &Grammar, name: &str, from: &Expression, to: &Expression) -> Result<Grammar> {
    list_adjust(g, "narrow", name, from, to)
}

/// Rewrite `plus(x)` to `star(x)` in the rules of `name`.
pub fn widen(g: &Grammar, name: &str, from: &Expression, to: &Expression) -> Result<Grammar> {
    list_adjust(g, "widen", name, from, to)
}

pub fn permute(g: &Grammar, name: &str, rhs: &Expression, order: &[usize]) -> Result<Grammar> {
    require_defined(g, name)?;
    let Expression::Sequence(parts) = rhs else {
        return Err(E::BadPermutation { order: join(order), len: 1 });
    };
    let mut seen = vec![false; parts.len()];
    let valid = order.len() == parts.len()
        && order.iter().all(|&i| i >= 1 && i <= parts.len() && !std::mem::replace(&mut seen[i - 1], true));
    if !valid {
        return Err(E::BadPermutation { order: join(order), len: parts.len() });
    }
    let new = Expression::Sequence(order.iter().map(|&i| parts[i - 1].clone()).collect());
    let mut out = g.clone();
    let mut hit = false;
    for p in out.productions.iter_mut().filter(|p| p.lhs == name && p.rhs == *rhs) {
        p.rhs = new.clone();
        hit = true;
    }
    if !hit {
        return Err(E::NoSuchRule { lhs: name.to_string(), rhs: rhs.to_string() });
    }
    Ok(out)
}

fn join(order: &[usize]) -> String {
    order.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// Replace every use of the nonterminal `name` by a value.
pub fn bind(g: &Grammar, name: &str, value: &Expression) -> Result<Grammar> {
    if !value.is_value() {
        return Err(E::NotAValue(value.to_string()));
    }
    if g.use_count(name) == 0 {
        return Err(E::NoOccurrence(name.to_string()));
    }
    let mut out = g.clone();
    for p in out.productions.iter_mut() {
        p.rhs = p.rhs.substitute(name, value);
    }
    Ok(out)
}
