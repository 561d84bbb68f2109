//! Guided grammar convergence.
//!
//! Two grammars are compared through production signatures: for each
//! nonterminal, the multiset of markers (`1 ? + *`) under which it occurs in
//! a right-hand side. Productions with equivalent signatures are paired,
//! the pairs induce a correspondence between the two vocabularies
//! ([`nominal_resolution`]), and the rules of corresponding nonterminals are
//! then aligned ([`structural_match`]).
//!
//! [`guided_converge`] runs the whole pipeline on a raw servant grammar:
//! deyaccify, normalize to ANF, resolve names, match structure.

mod resolve;
mod sig;
mod structural;

use std::collections::BTreeSet;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::Serialize;

use crate::grammar::{Grammar, Production};
use crate::mutate::{anf_check, mutate, MutateError, Mutation};
use crate::transform::Step;

pub use resolve::nominal_resolution;
pub use sig::{
    equivalence, footprint, pair_resolution, prodsig, prodsig_table, sig_metrics, strong_equiv, weak_equiv, Footprint,
    ProdSig, SigMetrics, Strength,
};
pub use structural::structural_match;

/// A nonterminal or value name, or ω for "no counterpart".
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Name {
    Sym(String),
    Omega,
}

impl Name {
    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Name::Sym(s) => Some(s),
            Name::Omega => None,
        }
    }
}

impl From<String> for Name {
    fn from(s: String) -> Name {
        Name::Sym(s)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::Sym(s.to_string())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Sym(s) => f.write_str(s),
            Name::Omega => f.write_str("ω"),
        }
    }
}

impl Serialize for Name {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Name::Sym(n) => s.serialize_str(n),
            Name::Omega => s.serialize_str("omega"),
        }
    }
}

/// A relation between servant names (left) and master names (right).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NominalMapping {
    pairs: BTreeSet<(Name, Name)>,
}

impl NominalMapping {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Self {
        NominalMapping { pairs: pairs.into_iter().collect() }
    }

    pub fn pairs(&self) -> Vec<(Name, Name)> {
        self.pairs.iter().cloned().collect()
    }

    /// Pairs with a name on both sides.
    pub fn bound(&self) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .filter_map(|(a, b)| Some((a.as_sym()?.to_string(), b.as_sym()?.to_string())))
            .collect()
    }

    /// Counterpart of a servant name.
    pub fn get(&self, servant: &str) -> Option<&Name> {
        self.pairs.iter().find(|(a, _)| a.as_sym() == Some(servant)).map(|(_, b)| b)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Whether every left name has at most one counterpart.
    pub fn is_functional(&self) -> bool {
        let lefts: Vec<&Name> = self.pairs.iter().map(|(a, _)| a).filter(|a| **a != Name::Omega).collect();
        let distinct: BTreeSet<&&Name> = lefts.iter().collect();
        distinct.len() == lefts.len()
    }

    /// The same mapping with servant name `from` called `to`.
    pub fn rename_servant(&self, from: &str, to: &str) -> NominalMapping {
        NominalMapping::from_pairs(self.pairs.iter().map(|(a, b)| {
            let a = if a.as_sym() == Some(from) { Name::from(to) } else { a.clone() };
            (a, b.clone())
        }))
    }
}

impl fmt::Display for NominalMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("⟨{a}, {b}⟩")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for NominalMapping {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.pairs.len()))?;
        for p in &self.pairs {
            seq.serialize_element(p)?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvergeError {
    #[error("`{left}` and `{right}` are not {strength}ly equivalent")]
    NotEquivalent { left: String, right: String, strength: Strength },
    #[error("ambiguous name resolution: {reason}{}", render_candidates(.candidates))]
    Ambiguity { candidates: Vec<NominalMapping>, reason: String },
    #[error("inconsistent name resolution: {detail}")]
    Inconsistent { detail: String },
    #[error("normalizing the {which} grammar failed: {source}")]
    Normalize { which: &'static str, source: MutateError },
}

fn render_candidates(c: &[NominalMapping]) -> String {
    c.iter().map(|m| format!("\n  candidate {m}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairMatch {
    pub servant: Production,
    pub master: Production,
    pub strength: Strength,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Servant,
    Master,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub side: Side,
    pub production: Production,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub pair_matches: Vec<PairMatch>,
    pub mapping: NominalMapping,
    pub residue: Vec<Residue>,
    /// Steps normalizing the raw servant; empty when matching started from
    /// an already normalized grammar.
    pub anf_trace: Vec<Step>,
    pub structural_trace: Vec<Step>,
    pub warnings: Vec<String>,
}

impl MatchReport {
    pub fn is_complete(&self) -> bool {
        self.residue.is_empty()
    }

    pub fn count(&self, strength: Strength) -> usize {
        self.pair_matches.iter().filter(|m| m.strength == strength).count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Listing of the matched pairs, the mapping and the residue.
    pub fn render(&self) -> String {
        let rows: Vec<(String, &str, String)> = self
            .pair_matches
            .iter()
            .map(|m| {
                let rel = if m.strength == Strength::Strong { "≎" } else { "≎w" };
                (m.servant.to_term(), rel, m.master.to_term())
            })
            .collect();
        let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (a, rel, b) in &rows {
            let pad = " ".repeat(width - a.chars().count());
            out.push_str(&format!("{a}{pad}  {rel:<2}  {b}\n"));
        }
        out.push_str(&format!(
            "\n{} strong, {} weak\nservant ◇ master = {}\n",
            self.count(Strength::Strong),
            self.count(Strength::Weak),
            self.mapping
        ));
        if !self.residue.is_empty() {
            out.push_str("\nresidue:\n");
            for r in &self.residue {
                let side = if r.side == Side::Servant { "servant" } else { "master" };
                out.push_str(&format!("  {side:<7}  {}\n", r.production.to_term()));
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

/// A named intermediate grammar of the pipeline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub name: &'static str,
    pub grammar: Grammar,
}

/// [`guided_converge`] together with the grammar after each phase.
pub fn guided_converge_phases(master: &Grammar, servant_raw: &Grammar) -> Result<(MatchReport, Vec<Phase>), ConvergeError> {
    let mut warnings = Vec::new();
    let mut phases = Vec::new();
    let master = if anf_check(master).is_empty() {
        master.clone()
    } else {
        warnings.push("the master grammar is not in ANF and was normalized".to_string());
        mutate(master, &Mutation::NormalizeAnf)
            .map_err(|source| ConvergeError::Normalize { which: "master", source })?
            .grammar
    };
    let norm = |e| ConvergeError::Normalize { which: "servant", source: e };
    let dey = mutate(servant_raw, &Mutation::DeyaccifyAll).map_err(norm)?;
    phases.push(Phase { name: "deyaccified", grammar: dey.grammar.clone() });
    let anf = mutate(&dey.grammar, &Mutation::NormalizeAnf).map_err(norm)?;
    phases.push(Phase { name: "anf", grammar: anf.grammar.clone() });
    let mut anf_trace = dey.trace;
    anf_trace.extend(anf.trace);

    let mapping = nominal_resolution(&master, &anf.grammar)?;
    let mut report = structural_match(&master, &anf.grammar, &mapping);
    let converged = crate::transform::apply_script(&anf.grammar, &report.structural_trace).expect("structural trace replays");
    phases.push(Phase { name: "converged", grammar: converged });
    report.anf_trace = anf_trace;
    report.warnings = warnings;
    Ok((report, phases))
}

/// Run the convergence pipeline from a raw servant grammar to a match
/// report against `master`.
pub fn guided_converge(master: &Grammar, servant_raw: &Grammar) -> Result<MatchReport, ConvergeError> {
    guided_converge_phases(master, servant_raw).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Expression as X;
    use crate::transform::apply_script;

    #[test]
    fn mapping_rendering() {
        let m = NominalMapping::from_pairs([(Name::from("A"), Name::from("a")), (Name::from("B"), Name::Omega)]);
        assert_eq!(m.to_string(), "{⟨A, a⟩, ⟨B, ω⟩}");
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"[["A","a"],["B","omega"]]"#);
        assert!(m.is_functional());
        assert_eq!(m.rename_servant("B", "C").get("C"), Some(&Name::Omega));
    }

    #[test]
    fn converge_trivial() {
        let g = Grammar::new(
            vec!["a".into()],
            vec![Production::new("a", X::seq([X::ValueStr, X::star(X::n("b"))])), Production::new("b", X::ValueInt)],
        );
        let r = guided_converge(&g, &g).unwrap();
        assert!(r.is_complete() && r.anf_trace.is_empty() && r.structural_trace.is_empty());
        assert!(r.mapping.pairs().iter().all(|(a, b)| a == b));
    }

    #[test]
    fn yaccified_servant_is_deyaccified_first() {
        let master = Grammar::new(
            vec!["a".into()],
            vec![Production::new("a", X::plus(X::n("b"))), Production::new("b", X::ValueInt)],
        );
        let servant = Grammar::new(
            vec!["A".into()],
            vec![
                Production::new("A", X::n("B")),
                Production::new("A", X::seq([X::n("A"), X::n("B")])),
                Production::new("B", X::ValueInt),
            ],
        );
        let r = guided_converge(&master, &servant).unwrap();
        assert_eq!(r.anf_trace[0], Step::Deyaccify { name: "A".into() });
        assert!(r.is_complete(), "{}", r.render());
        let out = apply_script(&apply_script(&servant, &r.anf_trace).unwrap(), &r.structural_trace).unwrap();
        assert!(out.eq_unordered(&master));
    }
}
