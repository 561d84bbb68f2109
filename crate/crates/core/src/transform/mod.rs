//! Programmable grammar transformation operators and their bidirectional
//! pairing.
//!
//! A [`Step`] is one operator application; [`apply_script`] composes steps
//! left to right and fails atomically. [`bidirectionalize`] pairs an
//! invertible step with the step that undoes it on the given input grammar.

mod bidir;
mod ops;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grammar::{Expression, Grammar};

pub use bidir::{bidirectionalize, invert_script, BidirError, BidirectionalStep, InvertError};
pub use ops::{dnf, massage_law, yacc_pattern};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecursionStyle {
    Left,
    Right,
}

impl fmt::Display for RecursionStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecursionStyle::Left => "left",
            RecursionStyle::Right => "right",
        })
    }
}

/// One operator application. Serialized as `{"op": "...", "args": {...}}`.
///
/// The first eleven variants are the invertible operators (the ten
/// operators of the subset plus `yaccify`, which pairs with `deyaccify`).
/// The remaining ones are auxiliary: they record what bulk mutations and
/// structural matching did so traces can be replayed, but have no inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "kebab-case")]
pub enum Step {
    Rename { from: String, to: String },
    Extract { name: String, expr: Expression },
    Inline { name: String },
    Chain { lhs: String, rhs: Expression, name: String },
    Unchain { name: String },
    Vertical { name: String },
    Horizontal { name: String },
    Factor { name: String, from: Expression, to: Expression },
    Distribute { name: String },
    Deyaccify { name: String },
    Yaccify { name: String, style: RecursionStyle },
    Unlabel { label: String },
    Anonymize { name: String },
    Abstractize { name: String },
    Massage { name: String, from: Expression, to: Expression },
    Reroot { roots: Vec<String> },
    Eliminate { name: String },
    Narrow { name: String, from: Expression, to: Expression },
    Widen { name: String, from: Expression, to: Expression },
    Permute { name: String, rhs: Expression, order: Vec<usize> },
    Bind { name: String, value: Expression },
}

impl Step {
    pub fn op_name(&self) -> &'static str {
        match self {
            Step::Rename { .. } => "rename",
            Step::Extract { .. } => "extract",
            Step::Inline { .. } => "inline",
            Step::Chain { .. } => "chain",
            Step::Unchain { .. } => "unchain",
            Step::Vertical { .. } => "vertical",
            Step::Horizontal { .. } => "horizontal",
            Step::Factor { .. } => "factor",
            Step::Distribute { .. } => "distribute",
            Step::Deyaccify { .. } => "deyaccify",
            Step::Yaccify { .. } => "yaccify",
            Step::Unlabel { .. } => "unlabel",
            Step::Anonymize { .. } => "anonymize",
            Step::Abstractize { .. } => "abstractize",
            Step::Massage { .. } => "massage",
            Step::Reroot { .. } => "reroot",
            Step::Eliminate { .. } => "eliminate",
            Step::Narrow { .. } => "narrow",
            Step::Widen { .. } => "widen",
            Step::Permute { .. } => "permute",
            Step::Bind { .. } => "bind",
        }
    }

    /// Whether the operator has an inverse at all (it may still be outside
    /// its bijective domain for a particular grammar).
    pub fn has_inverse(&self) -> bool {
        matches!(
            self,
            Step::Rename { .. }
                | Step::Extract { .. }
                | Step::Inline { .. }
                | Step::Chain { .. }
                | Step::Unchain { .. }
                | Step::Vertical { .. }
                | Step::Horizontal { .. }
                | Step::Factor { .. }
                | Step::Distribute { .. }
                | Step::Deyaccify { .. }
                | Step::Yaccify { .. }
        )
    }

    pub fn apply(&self, g: &Grammar) -> Result<Grammar, TransformError> {
        use Step::*;
        match self {
            Rename { from, to } => ops::rename(g, from, to),
            Extract { name, expr } => ops::extract(g, name, expr),
            Inline { name } => ops::inline(g, name),
            Chain { lhs, rhs, name } => ops::chain(g, lhs, rhs, name),
            Unchain { name } => ops::unchain(g, name),
            Vertical { name } => ops::vertical(g, name),
            Horizontal { name } => ops::horizontal(g, name),
            Factor { name, from, to } => ops::factor(g, name, from, to),
            Distribute { name } => ops::distribute(g, name),
            Deyaccify { name } => ops::deyaccify(g, name),
            Yaccify { name, style } => ops::yaccify(g, name, *style),
            Unlabel { label } => ops::unlabel(g, label),
            Anonymize { name } => ops::anonymize(g, name),
            Abstractize { name } => ops::abstractize(g, name),
            Massage { name, from, to } => ops::massage(g, name, from, to),
            Reroot { roots } => ops::reroot(g, roots),
            Eliminate { name } => ops::eliminate(g, name),
            Narrow { name, from, to } => ops::narrow(g, name, from, to),
            Widen { name, from, to } => ops::widen(g, name, from, to),
            Permute { name, rhs, order } => ops::permute(g, name, rhs, order),
            Bind { name, value } => ops::bind(g, name, value),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Step::*;
        match self {
            Rename { from, to } => write!(f, "rename({from}, {to})"),
            Extract { name, expr } => write!(f, "extract({name} → {expr})"),
            Inline { name } | Unchain { name } | Vertical { name } | Horizontal { name } | Distribute { name }
            | Deyaccify { name } | Anonymize { name } | Abstractize { name } | Eliminate { name } => {
                write!(f, "{}({name})", self.op_name())
            }
            Chain { lhs, rhs, name } => write!(f, "chain({lhs} → {name}; {name} → {rhs})"),
            Yaccify { name, style } => write!(f, "yaccify({name}, {style})"),
            Unlabel { label } => write!(f, "unlabel([{label}])"),
            Factor { name, from, to } | Massage { name, from, to } | Narrow { name, from, to } | Widen { name, from, to } => {
                write!(f, "{}({from}, {to}, in {name})", self.op_name())
            }
            Reroot { roots } => write!(f, "reroot({})", roots.join(", ")),
            Permute { name, rhs, order } => {
                let o: Vec<String> = order.iter().map(|i| i.to_string()).collect();
                write!(f, "permute({name} → {rhs}, ({}))", o.join(" "))
            }
            Bind { name, value } => write!(f, "bind({name}, {value})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("nonterminal `{0}` does not occur in the grammar")]
    Absent(String),
    #[error("name `{0}` is already in use")]
    NameInUse(String),
    #[error("nonterminal `{0}` is not defined")]
    Undefined(String),
    #[error("nonterminal `{name}` must be defined by exactly one rule, found {found}")]
    NotSingleRule { name: String, found: usize },
    #[error("nonterminal `{0}` needs at least two rules")]
    TooFewRules(String),
    #[error("nonterminal `{0}` is a root")]
    IsRoot(String),
    #[error("nonterminal `{0}` refers to itself")]
    SelfReferential(String),
    #[error("expression {0} does not occur")]
    NoOccurrence(String),
    #[error("no rule {lhs} → {rhs}")]
    NoSuchRule { lhs: String, rhs: String },
    #[error("nonterminal `{0}` is not used exactly once in a chain rule")]
    NotChainUse(String),
    #[error("the rule of `{0}` is labelled")]
    Labelled(String),
    #[error("the right-hand side of `{0}` is not a choice")]
    NotChoice(String),
    #[error("factor operands are not equivalent: {from} vs {to}")]
    NotEquivalent { from: String, to: String },
    #[error("factor operands are identical")]
    IdenticalOperands,
    #[error("no inner choice to distribute in `{0}`")]
    NoInnerChoice(String),
    #[error("nonterminal `{0}` is not yaccified")]
    NotYaccified(String),
    #[error("nonterminal `{name}` cannot be yaccified in {style} style")]
    NotYaccifiable { name: String, style: RecursionStyle },
    #[error("{from} to {to} is not a separator-list law")]
    NotMassageLaw { from: String, to: String },
    #[error("{from} to {to} is not a valid {op}")]
    NotListAdjustment { op: &'static str, from: String, to: String },
    #[error("({order}) is not a permutation of a {len}-part sequence")]
    BadPermutation { order: String, len: usize },
    #[error("nonterminal `{0}` is reachable from the roots")]
    Reachable(String),
    #[error("root `{0}` does not occur in the grammar")]
    UnknownRoot(String),
    #[error("label `{0}` does not occur")]
    NoSuchLabel(String),
    #[error("{0} is not a value")]
    NotAValue(String),
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("step {index} ({step}) failed: {source}")]
pub struct ScriptError {
    /// 1-based position of the failing step.
    pub index: usize,
    pub step: Step,
    pub source: TransformError,
    /// The input grammar, untouched.
    pub original: Grammar,
}

/// Apply `steps` left to right. On failure nothing is applied and the error
/// carries the original grammar.
pub fn apply_script(g: &Grammar, steps: &[Step]) -> Result<Grammar, ScriptError> {
    let mut cur = g.clone();
    for (i, s) in steps.iter().enumerate() {
        cur = s.apply(&cur).map_err(|source| ScriptError {
            index: i + 1,
            step: s.clone(),
            source,
            original: g.clone(),
        })?;
    }
    Ok(cur)
}

/// Parse a script document: a JSON list of steps.
pub fn script_from_json(text: &str) -> Result<Vec<Step>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn script_to_json(steps: &[Step]) -> String {
    let mut s = serde_json::to_string_pretty(steps).expect("script serialization cannot fail");
    s.push('\n');
    s
}
