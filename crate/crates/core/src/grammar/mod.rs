//! Expression algebra, grammar container and the basic analyses over it.

mod expr;
mod json;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub use expr::Expression;
pub use json::{from_json, to_json, DecodeError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub label: Option<String>,
    pub lhs: String,
    pub rhs: Expression,
}

impl Production {
    pub fn new(lhs: impl Into<String>, rhs: Expression) -> Self {
        Production { label: None, lhs: lhs.into(), rhs }
    }

    pub fn labelled(label: impl Into<String>, lhs: impl Into<String>, rhs: Expression) -> Self {
        Production { label: Some(label.into()), lhs: lhs.into(), rhs }
    }

    /// A chain rule: the right-hand side is one atomic symbol.
    pub fn is_chain(&self) -> bool {
        self.rhs.is_atomic_symbol()
    }

    /// Rendering in the `p('', lhs, rhs)` style.
    pub fn to_term(&self) -> String {
        format!("p('{}', {}, {})", self.label.as_deref().unwrap_or(""), self.lhs, self.rhs.to_term())
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "[{l}] ")?;
        }
        write!(f, "{} → {}", self.lhs, self.rhs)
    }
}

/// Roots plus an ordered list of productions. Multiple productions with the
/// same left-hand side form a vertical definition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Grammar {
    pub roots: Vec<String>,
    pub productions: Vec<Production>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub defined: BTreeSet<String>,
    pub used: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("production {index} has an empty left-hand side")]
    EmptyLhs { index: usize },
    #[error("root `{0}` is neither defined nor used")]
    UnknownRoot(String),
}

impl Grammar {
    pub fn new(roots: Vec<String>, productions: Vec<Production>) -> Self {
        Grammar { roots, productions }
    }

    /// Check the container invariants: non-empty lhs names and roots that
    /// occur in the grammar.
    pub fn validate(&self) -> Result<(), GrammarError> {
        for (index, p) in self.productions.iter().enumerate() {
            if p.lhs.is_empty() {
                return Err(GrammarError::EmptyLhs { index });
            }
        }
        let names = self.names();
        for r in &self.roots {
            if !names.contains(r) {
                return Err(GrammarError::UnknownRoot(r.clone()));
            }
        }
        Ok(())
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::default();
        for p in &self.productions {
            v.defined.insert(p.lhs.clone());
            v.used.extend(p.rhs.nonterminals());
            v.terminals.extend(p.rhs.terminals());
        }
        v
    }

    /// Defined ∪ used nonterminal names.
    pub fn names(&self) -> BTreeSet<String> {
        let v = self.vocabulary();
        v.defined.union(&v.used).cloned().collect()
    }

    /// Defined but never used.
    pub fn tops(&self) -> BTreeSet<String> {
        let v = self.vocabulary();
        v.defined.difference(&v.used).cloned().collect()
    }

    /// Defined nonterminals in order of first definition.
    pub fn defined_in_order(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for p in &self.productions {
            if seen.insert(p.lhs.clone()) {
                out.push(p.lhs.clone());
            }
        }
        out
    }

    /// All nonterminal names in order of first appearance (lhs, then rhs,
    /// production by production), followed by roots not seen otherwise.
    pub fn names_in_order(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut push = |n: &str, out: &mut Vec<String>| {
            if seen.insert(n.to_string()) {
                out.push(n.to_string());
            }
        };
        for p in &self.productions {
            push(&p.lhs, &mut out);
            p.rhs.walk(&mut |e| {
                if let Expression::Nonterminal(n) = e {
                    push(n, &mut out);
                }
            });
        }
        for r in &self.roots {
            push(r, &mut out);
        }
        out
    }

    pub fn rules_of<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Production> + 'a {
        self.productions.iter().filter(move |p| p.lhs == name)
    }

    pub fn rule_indices(&self, name: &str) -> Vec<usize> {
        (0..self.productions.len()).filter(|&i| self.productions[i].lhs == name).collect()
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.productions.iter().any(|p| p.lhs == name)
    }

    /// Number of occurrences of `name` across all right-hand sides.
    pub fn use_count(&self, name: &str) -> usize {
        self.productions.iter().map(|p| p.rhs.count_nonterminal(name)).sum()
    }

    /// Direct nonterminal successors of every defined nonterminal.
    pub fn call_graph(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut g: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for p in &self.productions {
            g.entry(p.lhs.clone()).or_default().extend(p.rhs.nonterminals());
        }
        g
    }

    /// A defined nonterminal whose rules reference no nonterminals.
    pub fn is_leaf(&self, name: &str) -> bool {
        self.rules_of(name).all(|p| p.rhs.nonterminals().is_empty())
    }

    /// Transitive closure of the use relation, including `from` itself.
    pub fn reachable(&self, from: &BTreeSet<String>) -> BTreeSet<String> {
        let graph = self.call_graph();
        let mut seen: BTreeSet<String> = from.clone();
        let mut queue: VecDeque<String> = from.iter().cloned().collect();
        while let Some(n) = queue.pop_front() {
            if let Some(next) = graph.get(&n) {
                for m in next {
                    if seen.insert(m.clone()) {
                        queue.push_back(m.clone());
                    }
                }
            }
        }
        seen
    }

    /// Declared roots, or the tops when no roots are declared.
    pub fn start_symbols(&self) -> BTreeSet<String> {
        if self.roots.is_empty() {
            self.tops()
        } else {
            self.roots.iter().cloned().collect()
        }
    }

    /// Equality up to production order: same root set and the same
    /// multiset of productions.
    pub fn eq_unordered(&self, other: &Grammar) -> bool {
        let ra: BTreeSet<&String> = self.roots.iter().collect();
        let rb: BTreeSet<&String> = other.roots.iter().collect();
        if ra != rb || self.productions.len() != other.productions.len() {
            return false;
        }
        let mut a: Vec<&Production> = self.productions.iter().collect();
        let mut b: Vec<&Production> = other.productions.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.roots.is_empty() {
            writeln!(f, "roots: {}", self.roots.join(", "))?;
        }
        for p in &self.productions {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
