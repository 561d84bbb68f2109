//! The sixteen grammar mutations and Abstract Normal Form.
//!
//! A mutation is a grammar-dependent bulk change: what it does is decided by
//! the grammar, not by operands. Every mutation records the transformation
//! steps it performed, so its effect can be replayed with
//! [`crate::transform::apply_script`] and, for the kinds realised by
//! invertible operators, undone with [`crate::transform::invert_script`].

mod anf;
mod naming;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grammar::{Expression, Grammar};
use crate::transform::{dnf, massage_law, Step, TransformError};

pub use anf::{anf_check, expected_roots, AnfViolation};
pub use naming::{fresh_name, plan_renames, split_words, Convention};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    RemoveTerminals,
    RemoveSelectors,
    RemoveLabels,
    DisciplinedRename(Convention),
    RerootToTop,
    EliminateTop,
    ExtractSubgrammar(Vec<String>),
    AllVertical,
    AllHorizontal,
    DistributeAll,
    PotentiallyHorizontalToVertical,
    DeyaccifyAll,
    RemoveLazy,
    NormalizeAnf,
    FoldGroups,
    EncodeSeplists,
}

const KINDS: [&str; 16] = [
    "remove-terminals",
    "remove-selectors",
    "remove-labels",
    "disciplined-rename",
    "reroot-to-top",
    "eliminate-top",
    "extract-subgrammar",
    "all-vertical",
    "all-horizontal",
    "distribute-all",
    "potentially-horizontal-to-vertical",
    "deyaccify-all",
    "remove-lazy",
    "normalize-anf",
    "fold-groups",
    "encode-seplists",
];

impl Mutation {
    /// Position 1–16 in the catalogue.
    pub fn number(&self) -> u8 {
        use Mutation::*;
        match self {
            RemoveTerminals => 1,
            RemoveSelectors => 2,
            RemoveLabels => 3,
            DisciplinedRename(_) => 4,
            RerootToTop => 5,
            EliminateTop => 6,
            ExtractSubgrammar(_) => 7,
            AllVertical => 8,
            AllHorizontal => 9,
            DistributeAll => 10,
            PotentiallyHorizontalToVertical => 11,
            DeyaccifyAll => 12,
            RemoveLazy => 13,
            NormalizeAnf => 14,
            FoldGroups => 15,
            EncodeSeplists => 16,
        }
    }

    pub fn kind(&self) -> &'static str {
        KINDS[self.number() as usize - 1]
    }

    /// Kinds whose traces consist of invertible operators only (on
    /// label-free grammars).
    pub fn claims_invertible(&self) -> bool {
        matches!(self.number(), 4 | 8 | 9 | 10 | 11 | 12 | 15)
    }

    /// Build from a kind name and its JSON arguments.
    pub fn from_parts(kind: &str, args: &serde_json::Value) -> Result<Mutation, String> {
        let field = |name: &str| args.get(name).ok_or_else(|| format!("{kind}: missing argument `{name}`"));
        Ok(match kind {
            "disciplined-rename" => {
                let c = field("convention")?.as_str().ok_or("convention must be a string")?;
                Mutation::DisciplinedRename(c.parse()?)
            }
            "extract-subgrammar" => {
                let roots: Vec<String> =
                    serde_json::from_value(field("roots")?.clone()).map_err(|e| format!("{kind}: roots: {e}"))?;
                Mutation::ExtractSubgrammar(roots)
            }
            other => {
                let i = KINDS.iter().position(|k| *k == other).ok_or_else(|| format!("unknown mutation `{other}`"))?;
                Self::simple(i as u8 + 1).ok_or_else(|| format!("{other}: missing arguments"))?
            }
        })
    }

    fn simple(number: u8) -> Option<Mutation> {
        use Mutation::*;
        Some(match number {
            1 => RemoveTerminals,
            2 => RemoveSelectors,
            3 => RemoveLabels,
            5 => RerootToTop,
            6 => EliminateTop,
            8 => AllVertical,
            9 => AllHorizontal,
            10 => DistributeAll,
            11 => PotentiallyHorizontalToVertical,
            12 => DeyaccifyAll,
            13 => RemoveLazy,
            14 => NormalizeAnf,
            15 => FoldGroups,
            16 => EncodeSeplists,
            _ => return None,
        })
    }

    pub fn args(&self) -> serde_json::Value {
        match self {
            Mutation::DisciplinedRename(c) => serde_json::json!({ "convention": c.as_str() }),
            Mutation::ExtractSubgrammar(r) => serde_json::json!({ "roots": r }),
            _ => serde_json::json!({}),
        }
    }

    pub fn apply(&self, g: &Grammar) -> Result<MutationResult, MutateError> {
        mutate(g, self)
    }
}

/// `kind` or `kind:args`, where args is a convention name for
/// disciplined-rename and a comma-separated root list for
/// extract-subgrammar.
impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let args = match (kind, arg) {
            ("disciplined-rename", Some(a)) => serde_json::json!({ "convention": a }),
            ("extract-subgrammar", Some(a)) => {
                serde_json::json!({ "roots": a.split(',').filter(|x| !x.is_empty()).collect::<Vec<_>>() })
            }
            (_, Some(_)) => return Err(format!("mutation `{kind}` takes no arguments")),
            (_, None) => serde_json::json!({}),
        };
        Mutation::from_parts(kind, &args)
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mutation::DisciplinedRename(c) => write!(f, "{}:{c}", self.kind()),
            Mutation::ExtractSubgrammar(r) => write!(f, "{}:{}", self.kind(), r.join(",")),
            _ => f.write_str(self.kind()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WireMutation {
    mutation: String,
    #[serde(default)]
    args: serde_json::Value,
}

/// `{"mutation": kind, "args": {...}}`
impl Serialize for Mutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WireMutation { mutation: self.kind().to_string(), args: self.args() }.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyMutation {
    Text(String),
    Wire(WireMutation),
}

/// Either the wire object or the `kind[:args]` text form.
impl<'de> Deserialize<'de> for Mutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match AnyMutation::deserialize(d)? {
            AnyMutation::Text(s) => s.parse().map_err(serde::de::Error::custom),
            AnyMutation::Wire(w) => Mutation::from_parts(&w.mutation, &w.args).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationResult {
    pub grammar: Grammar,
    pub trace: Vec<Step>,
    pub changed_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MutateError {
    #[error("undefined nonterminals: {}", .0.join(", "))]
    UndefinedNames(Vec<String>),
    #[error("naming convention collision: `{a}` and `{b}` both become `{target}`")]
    ConventionCollision { a: String, b: String, target: String },
    #[error("internal step failure at {step}: {source}")]
    Step { step: Box<Step>, source: TransformError },
}

struct Run {
    g: Grammar,
    trace: Vec<Step>,
}

impl Run {
    fn step(&mut self, s: Step) -> Result<(), MutateError> {
        self.g = s.apply(&self.g).map_err(|source| MutateError::Step { step: Box::new(s.clone()), source })?;
        self.trace.push(s);
        Ok(())
    }

    fn fresh(&self, base: &str) -> String {
        fresh_name(base, &self.g.names())
    }
}

pub fn mutate(g: &Grammar, m: &Mutation) -> Result<MutationResult, MutateError> {
    let mut r = Run { g: g.clone(), trace: Vec::new() };
    match m {
        Mutation::RemoveTerminals => remove_terminals(&mut r)?,
        Mutation::RemoveSelectors => remove_selectors(&mut r)?,
        Mutation::RemoveLabels => remove_labels(&mut r)?,
        Mutation::DisciplinedRename(c) => disciplined_rename(&mut r, *c)?,
        Mutation::RerootToTop => reroot_to_top(&mut r)?,
        Mutation::EliminateTop => eliminate_top(&mut r)?,
        Mutation::ExtractSubgrammar(roots) => extract_subgrammar(&mut r, roots)?,
        Mutation::AllVertical => all_vertical(&mut r)?,
        Mutation::AllHorizontal => all_horizontal(&mut r)?,
        Mutation::DistributeAll => distribute_all(&mut r)?,
        Mutation::PotentiallyHorizontalToVertical => {
            distribute_all(&mut r)?;
            all_vertical(&mut r)?;
        }
        Mutation::DeyaccifyAll => deyaccify_all(&mut r)?,
        Mutation::RemoveLazy => remove_lazy(&mut r)?,
        Mutation::NormalizeAnf => normalize_anf(&mut r)?,
        Mutation::FoldGroups => fold_groups(&mut r)?,
        Mutation::EncodeSeplists => encode_seplists(&mut r)?,
    }
    let changed_count = r.trace.len();
    Ok(MutationResult { grammar: r.g, trace: r.trace, changed_count })
}

fn rules_match(g: &Grammar, n: &str, pred: &dyn Fn(&Expression) -> bool) -> bool {
    g.rules_of(n).any(|p| p.rhs.any_node(pred))
}

fn remove_terminals(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        if rules_match(&r.g, &n, &|x| matches!(x, Expression::Terminal(_))) {
            r.step(Step::Abstractize { name: n })?;
        }
    }
    Ok(())
}

fn remove_selectors(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        if rules_match(&r.g, &n, &|x| matches!(x, Expression::Selectable(..))) {
            r.step(Step::Anonymize { name: n })?;
        }
    }
    Ok(())
}

fn remove_labels(r: &mut Run) -> Result<(), MutateError> {
    let mut seen = BTreeSet::new();
    let labels: Vec<String> =
        r.g.productions.iter().filter_map(|p| p.label.clone()).filter(|l| seen.insert(l.clone())).collect();
    for label in labels {
        r.step(Step::Unlabel { label })?;
    }
    Ok(())
}

fn disciplined_rename(r: &mut Run, c: Convention) -> Result<(), MutateError> {
    let names = r.g.names_in_order();
    let mut by_target: std::collections::BTreeMap<String, String> = Default::default();
    let mut pairs = Vec::new();
    for n in names {
        let t = c.apply(&n);
        if let Some(prev) = by_target.insert(t.clone(), n.clone()) {
            return Err(MutateError::ConventionCollision { a: prev, b: n, target: t });
        }
        pairs.push((n, t));
    }
    for s in plan_renames(&r.g, &pairs) {
        r.step(s)?;
    }
    Ok(())
}

fn reroot_to_top(r: &mut Run) -> Result<(), MutateError> {
    let roots = expected_roots(&r.g);
    if roots != r.g.roots {
        r.step(Step::Reroot { roots })?;
    }
    Ok(())
}

fn eliminate_unreachable(r: &mut Run, from: &BTreeSet<String>) -> Result<(), MutateError> {
    let reach = r.g.reachable(from);
    for n in r.g.defined_in_order() {
        if !reach.contains(&n) {
            r.step(Step::Eliminate { name: n })?;
        }
    }
    Ok(())
}

fn eliminate_top(r: &mut Run) -> Result<(), MutateError> {
    let start = r.g.start_symbols();
    eliminate_unreachable(r, &start)
}

fn extract_subgrammar(r: &mut Run, roots: &[String]) -> Result<(), MutateError> {
    let missing: Vec<String> = roots.iter().filter(|n| !r.g.is_defined(n)).cloned().collect();
    if !missing.is_empty() {
        return Err(MutateError::UndefinedNames(missing));
    }
    if r.g.roots != roots {
        r.step(Step::Reroot { roots: roots.to_vec() })?;
    }
    let from = roots.iter().cloned().collect();
    eliminate_unreachable(r, &from)
}

fn all_vertical(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        // a selectable alternative becomes a labelled rule, which may itself
        // be a choice
        loop {
            let rules: Vec<_> = r.g.rules_of(&n).cloned().collect();
            if !rules.iter().any(|p| matches!(p.rhs, Expression::Choice(_))) {
                break;
            }
            let mut seen = BTreeSet::new();
            for p in &rules {
                if let (Some(l), Expression::Choice(_)) = (&p.label, &p.rhs) {
                    if seen.insert(l.clone()) {
                        r.step(Step::Unlabel { label: l.clone() })?;
                    }
                }
            }
            if rules.len() > 1 {
                r.step(Step::Horizontal { name: n.clone() })?;
            }
            r.step(Step::Vertical { name: n.clone() })?;
        }
    }
    Ok(())
}

fn all_horizontal(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        if r.g.rules_of(&n).count() > 1 {
            r.step(Step::Horizontal { name: n })?;
        }
    }
    Ok(())
}

fn is_repetition(e: &Expression) -> bool {
    use Expression::*;
    matches!(e, Optional(_) | Star(_) | Plus(_) | SepListStar(..) | SepListPlus(..))
}

fn has_choice(e: &Expression) -> bool {
    e.any_node(&|x| matches!(x, Expression::Choice(_)))
}

/// First operand (pre-order) of a repetition that contains a choice.
fn choice_under_repetition(e: &Expression) -> Option<Expression> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_none() && is_repetition(x) {
            found = x.children().into_iter().find(|c| has_choice(c)).cloned();
        }
    });
    found
}

fn distribute_all(r: &mut Run) -> Result<(), MutateError> {
    loop {
        let before = r.trace.len();
        for n in r.g.defined_in_order() {
            loop {
                let hit = r.g.rules_of(&n).find_map(|p| choice_under_repetition(&p.rhs));
                let Some(e) = hit else { break };
                let name = r.fresh(&n);
                r.step(Step::Extract { name, expr: e })?;
            }
            let rules: Vec<Expression> = r.g.rules_of(&n).map(|p| p.rhs.clone()).collect();
            if rules.len() == 1 {
                if Expression::choice(dnf(&rules[0])) != rules[0] {
                    r.step(Step::Distribute { name: n.clone() })?;
                }
                continue;
            }
            for rhs in rules {
                let flat = Expression::choice(dnf(&rhs));
                let still_there = r.g.rules_of(&n).any(|p| p.rhs == rhs);
                if flat != rhs && still_there {
                    r.step(Step::Factor { name: n.clone(), from: rhs, to: flat })?;
                }
            }
        }
        if r.trace.len() == before {
            return Ok(());
        }
    }
}

fn deyaccify_all(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        let step = Step::Deyaccify { name: n };
        if step.apply(&r.g).is_ok() {
            r.step(step)?;
        }
    }
    Ok(())
}

/// A nonterminal that remove-lazy would inline.
pub fn is_lazy(g: &Grammar, n: &str) -> bool {
    let rules: Vec<_> = g.rules_of(n).collect();
    rules.len() == 1
        && !g.start_symbols().contains(n)
        && !rules[0].rhs.mentions(n)
        && (g.use_count(n) == 1 || rules[0].is_chain())
}

fn remove_lazy(r: &mut Run) -> Result<(), MutateError> {
    while let Some(n) = r.g.defined_in_order().into_iter().find(|n| is_lazy(&r.g, n)) {
        r.step(Step::Inline { name: n })?;
    }
    Ok(())
}

fn fix_chain_mixing(r: &mut Run) -> Result<(), MutateError> {
    loop {
        let mut target = None;
        for n in r.g.defined_in_order() {
            let rules: Vec<_> = r.g.rules_of(&n).collect();
            let chains = rules.iter().filter(|p| p.is_chain()).count();
            if chains > 0 && chains < rules.len() {
                let body = rules.iter().find(|p| !p.is_chain()).unwrap().rhs.clone();
                target = Some((n, body));
                break;
            }
        }
        let Some((n, body)) = target else { return Ok(()) };
        let name = r.fresh(&n);
        r.step(Step::Extract { name, expr: body })?;
    }
}

fn inline_trivial(r: &mut Run) -> Result<(), MutateError> {
    loop {
        let roots: BTreeSet<String> = r.g.roots.iter().cloned().collect();
        let hit = r.g.defined_in_order().into_iter().find(|n| {
            let rules: Vec<_> = r.g.rules_of(n).collect();
            rules.len() == 1
                && !roots.contains(n)
                && matches!(rules[0].rhs, Expression::Epsilon | Expression::Empty | Expression::Any)
        });
        let Some(n) = hit else { return Ok(()) };
        r.step(Step::Inline { name: n })?;
    }
}

fn normalize_anf(r: &mut Run) -> Result<(), MutateError> {
    loop {
        let before = r.trace.len();
        remove_labels(r)?;
        remove_selectors(r)?;
        remove_terminals(r)?;
        encode_seplists(r)?;
        distribute_all(r)?;
        all_vertical(r)?;
        fix_chain_mixing(r)?;
        inline_trivial(r)?;
        reroot_to_top(r)?;
        eliminate_top(r)?;
        if r.trace.len() == before {
            return Ok(());
        }
    }
}

/// Constructs that need group brackets when they appear as the operand of a
/// postfix operator or separator list.
pub fn needs_group_as_operand(e: &Expression) -> bool {
    use Expression::*;
    matches!(e, Sequence(_) | Choice(_) | SepListStar(..) | SepListPlus(..) | Epsilon)
}

/// First subexpression that fold-groups would extract.
pub fn foldable(e: &Expression) -> Option<Expression> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_some() {
            return;
        }
        if is_repetition(x) {
            found = x.children().into_iter().find(|c| needs_group_as_operand(c)).cloned();
        } else if let Expression::Sequence(parts) = x {
            found = parts.iter().find(|c| matches!(c, Expression::Choice(_) | Expression::Epsilon)).cloned();
        }
    });
    found
}

fn fold_groups(r: &mut Run) -> Result<(), MutateError> {
    loop {
        let hit = r.g.productions.iter().find_map(|p| foldable(&p.rhs).map(|e| (p.lhs.clone(), e)));
        let Some((lhs, e)) = hit else { return Ok(()) };
        let name = r.fresh(&lhs);
        r.step(Step::Extract { name, expr: e })?;
    }
}

fn first_seplist(e: &Expression) -> Option<Expression> {
    let mut found = None;
    e.walk(&mut |x| {
        if found.is_none() && matches!(x, Expression::SepListStar(..) | Expression::SepListPlus(..)) {
            found = Some(x.clone());
        }
    });
    found
}

fn encode_seplists(r: &mut Run) -> Result<(), MutateError> {
    for n in r.g.defined_in_order() {
        loop {
            let Some(from) = r.g.rules_of(&n).find_map(|p| first_seplist(&p.rhs)) else { break };
            let to = massage_law(&from).unwrap();
            r.step(Step::Massage { name: n.clone(), from, to })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{Expression as X, Production};
    use crate::transform::apply_script;

    fn g(prods: Vec<Production>) -> Grammar {
        Grammar::new(vec![], prods)
    }

    #[test]
    fn remove_terminals_single() {
        let gr = g(vec![Production::new("a", X::seq([X::t("x"), X::n("b")]))]);
        let res = mutate(&gr, &Mutation::RemoveTerminals).unwrap();
        assert_eq!(res.grammar.productions, vec![Production::new("a", X::n("b"))]);
        assert_eq!(res.changed_count, 1);
    }

    #[test]
    fn encode_seplists_example() {
        let gr = g(vec![Production::new("a", X::sepplus(X::n("b"), X::t(",")))]);
        let res = mutate(&gr, &Mutation::EncodeSeplists).unwrap();
        assert_eq!(res.grammar.productions[0].rhs, X::seq([X::n("b"), X::star(X::seq([X::t(","), X::n("b")]))]));
    }

    #[test]
    fn collision_is_reported() {
        let gr = g(vec![Production::new("Expr", X::n("expr"))]);
        let err = mutate(&gr, &Mutation::DisciplinedRename(Convention::Lower)).unwrap_err();
        assert!(matches!(err, MutateError::ConventionCollision { .. }));
    }

    #[test]
    fn extract_subgrammar_needs_defined_roots() {
        let gr = g(vec![Production::new("a", X::n("b"))]);
        let err = mutate(&gr, &Mutation::ExtractSubgrammar(vec!["b".into()])).unwrap_err();
        assert_eq!(err, MutateError::UndefinedNames(vec!["b".into()]));
    }

    #[test]
    fn all_vertical_merges_mixed_rules() {
        let gr = g(vec![
            Production::new("a", X::choice([X::n("b"), X::n("c")])),
            Production::new("a", X::n("d")),
        ]);
        let res = mutate(&gr, &Mutation::AllVertical).unwrap();
        let rhs: Vec<_> = res.grammar.rules_of("a").map(|p| p.rhs.clone()).collect();
        assert_eq!(rhs, vec![X::n("b"), X::n("c"), X::n("d")]);
        assert_eq!(apply_script(&gr, &res.trace).unwrap(), res.grammar);
    }

    #[test]
    fn distribute_all_surfaces_choice_under_star() {
        let gr = g(vec![Production::new("a", X::star(X::choice([X::n("b"), X::n("c")])))]);
        let res = mutate(&gr, &Mutation::DistributeAll).unwrap();
        assert_eq!(res.grammar.productions[0].rhs, X::star(X::n("a_1")));
        assert_eq!(res.grammar.productions[1].rhs, X::choice([X::n("b"), X::n("c")]));
    }

    #[test]
    fn mutation_text_forms() {
        for s in ["normalize-anf", "disciplined-rename:camel", "extract-subgrammar:a,b", "fold-groups"] {
            let m: Mutation = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(serde_json::from_str::<Mutation>(&json).unwrap(), m);
        }
        assert!("disciplined-rename".parse::<Mutation>().is_err());
        assert!("nope".parse::<Mutation>().is_err());
        let m: Mutation = serde_json::from_str(r#"{"mutation": "remove-lazy"}"#).unwrap();
        assert_eq!(m, Mutation::RemoveLazy);
        let m: Mutation = serde_json::from_str(r#""disciplined-rename:upper""#).unwrap();
        assert_eq!(m, Mutation::DisciplinedRename(Convention::Upper));
        let m: Mutation =
            serde_json::from_str(r#"{"mutation": "disciplined-rename", "args": {"convention": "dash-lower"}}"#).unwrap();
        assert_eq!(m, Mutation::DisciplinedRename(Convention::DashLower));
    }
}
