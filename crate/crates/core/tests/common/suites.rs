//! The randomized suites, shared by their own test targets and the
//! acceptance summary.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use gramconv::converge::{nominal_resolution, ConvergeError, NominalMapping};
use gramconv::grammar::{Expression as X, Grammar};
use gramconv::mutate::{anf_check, mutate, Convention, Mutation};
use gramconv::recovery::{recover, unparse};
use gramconv::transform::dnf;
use gramconv::transform::{apply_script, bidirectionalize, BidirError, RecursionStyle, Step};

use super::{brute_force_mappings, random_grammar, random_textual_grammar, reference_spec, rng, synthetic_pair, Shape};

pub fn roundtrip_failures(trials: usize, seed: u64) -> Vec<String> {
    let spec = reference_spec();
    let mut r = rng(seed);
    let mut failures = Vec::new();
    for i in 0..trials {
        let g = random_textual_grammar(&mut r);
        let text = match unparse(&g, &spec) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("#{i}: unparse: {e}\n{g}"));
                continue;
            }
        };
        match recover(&text, &spec) {
            Ok(rep) if rep.grammar == g => {}
            Ok(rep) => failures.push(format!("#{i}:\n{g}\ntext:\n{text}\nrecovered:\n{}", rep.grammar)),
            Err(e) => failures.push(format!("#{i}: recover: {e}\ntext:\n{text}")),
        }
    }
    failures
}

fn subexpressions(e: &X) -> Vec<X> {
    let mut out = Vec::new();
    e.walk(&mut |x| out.push(x.clone()));
    out
}

/// Left factoring of a choice whose alternatives share a first element.
fn left_factor(e: &X) -> Option<X> {
    let X::Choice(alts) = e else { return None };
    let heads: Vec<(&X, Vec<X>)> = alts
        .iter()
        .map(|a| match a {
            X::Sequence(p) => (&p[0], p[1..].to_vec()),
            other => (other, vec![]),
        })
        .collect();
    let head = heads[0].0;
    if !heads.iter().all(|(h, _)| *h == head) {
        return None;
    }
    Some(X::seq([head.clone(), X::choice(heads.into_iter().map(|(_, rest)| X::seq(rest)))]))
}

/// Steps of the invertible operators applicable, or nearly so, to `g`.
pub fn candidate_steps(g: &Grammar, r: &mut impl Rng) -> Vec<Step> {
    let names: Vec<String> = g.names_in_order();
    let defined = g.defined_in_order();
    let fresh = "zz".to_string();
    let mut out = Vec::new();
    if let Some(n) = names.choose(r) {
        out.push(Step::Rename { from: n.clone(), to: fresh.clone() });
    }
    for p in &g.productions {
        let subs = subexpressions(&p.rhs);
        if let Some(e) = subs.choose(r) {
            out.push(Step::Extract { name: fresh.clone(), expr: e.clone() });
        }
        out.push(Step::Chain { lhs: p.lhs.clone(), rhs: p.rhs.clone(), name: fresh.clone() });
    }
    for n in &defined {
        out.push(Step::Inline { name: n.clone() });
        out.push(Step::Unchain { name: n.clone() });
        out.push(Step::Vertical { name: n.clone() });
        out.push(Step::Horizontal { name: n.clone() });
        out.push(Step::Distribute { name: n.clone() });
        out.push(Step::Deyaccify { name: n.clone() });
        out.push(Step::Yaccify { name: n.clone(), style: RecursionStyle::Left });
        out.push(Step::Yaccify { name: n.clone(), style: RecursionStyle::Right });
    }
    for p in &g.productions {
        for e in subexpressions(&p.rhs) {
            let spread = X::choice(dnf(&e));
            if spread != e {
                out.push(Step::Factor { name: p.lhs.clone(), from: e.clone(), to: spread });
            }
            if let Some(to) = left_factor(&e) {
                out.push(Step::Factor { name: p.lhs.clone(), from: e.clone(), to });
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct InvertibilityStats {
    pub grammars: usize,
    /// Per operator, the forward steps whose round trip was checked.
    pub checked: BTreeMap<&'static str, usize>,
    /// Applicable steps outside their operator's bijective domain.
    pub refused: usize,
    pub failures: Vec<String>,
}

pub fn invertibility(trials: usize, seed: u64) -> InvertibilityStats {
    let mut r = rng(seed);
    let mut st = InvertibilityStats { grammars: trials, ..Default::default() };
    for i in 0..trials {
        let g = random_grammar(&mut r, Shape::FULL);
        for step in candidate_steps(&g, &mut r) {
            let pair = match bidirectionalize(&step, &g) {
                Ok(p) => p,
                Err(BidirError::Forward(_)) => continue,
                Err(BidirError::NotInvertible { .. }) => {
                    st.refused += 1;
                    continue;
                }
                Err(e) => {
                    st.failures.push(format!("#{i} {step}: {e}"));
                    continue;
                }
            };
            *st.checked.entry(step.op_name()).or_default() += 1;
            let fwd = pair.forward.apply(&g).expect("forward applied during bidirectionalize");
            match pair.backward.apply(&fwd) {
                Ok(back) if back.eq_unordered(&g) => {}
                Ok(back) => st.failures.push(format!("#{i} {step} / {}:\n{g}\nbecame\n{back}", pair.backward)),
                Err(e) => st.failures.push(format!("#{i} {step} / {}: {e}\n{g}", pair.backward)),
            }
        }
    }
    st
}

/// The 16 kinds, with arguments drawn for the parametrized ones.
pub fn all_kinds(g: &Grammar, r: &mut impl Rng) -> Vec<Mutation> {
    use Mutation::*;
    let keep: Vec<String> = g.defined_in_order().into_iter().take(1).collect();
    vec![
        RemoveTerminals,
        RemoveSelectors,
        RemoveLabels,
        DisciplinedRename(*Convention::ALL.choose(r).unwrap()),
        RerootToTop,
        EliminateTop,
        ExtractSubgrammar(keep),
        AllVertical,
        AllHorizontal,
        DistributeAll,
        PotentiallyHorizontalToVertical,
        DeyaccifyAll,
        RemoveLazy,
        NormalizeAnf,
        FoldGroups,
        EncodeSeplists,
    ]
}

#[derive(Debug, Default)]
pub struct IdempotenceStats {
    pub grammars: usize,
    /// Per kind, the applications checked.
    pub checked: BTreeMap<&'static str, usize>,
    /// Per kind, the applications rejected with an error.
    pub rejected: BTreeMap<&'static str, usize>,
    pub anf_checked: usize,
    pub failures: Vec<String>,
}

pub fn idempotence(trials: usize, seed: u64) -> IdempotenceStats {
    let mut r = rng(seed);
    let mut st = IdempotenceStats { grammars: trials, ..Default::default() };
    for i in 0..trials {
        let g = random_grammar(&mut r, Shape::FULL);
        for m in all_kinds(&g, &mut r) {
            let once = match mutate(&g, &m) {
                Ok(res) => res,
                Err(_) => {
                    *st.rejected.entry(m.kind()).or_default() += 1;
                    continue;
                }
            };
            *st.checked.entry(m.kind()).or_default() += 1;
            match apply_script(&g, &once.trace) {
                Ok(replayed) if replayed == once.grammar => {}
                _ => st.failures.push(format!("#{i} {m}: trace does not replay\n{g}")),
            }
            match mutate(&once.grammar, &m) {
                Ok(twice) if twice.changed_count == 0 && twice.grammar == once.grammar => {}
                Ok(twice) => st.failures.push(format!(
                    "#{i} {m}: second run changed {}:\n{g}\nonce\n{}\ntwice\n{}",
                    twice.changed_count, once.grammar, twice.grammar
                )),
                Err(e) => st.failures.push(format!("#{i} {m}: second run failed: {e}\n{}", once.grammar)),
            }
            if m == Mutation::NormalizeAnf {
                st.anf_checked += 1;
                let v = anf_check(&once.grammar);
                if !v.is_empty() {
                    st.failures.push(format!("#{i} normalize-anf leaves {v:?}\n{}", once.grammar));
                }
            }
        }
    }
    st
}

#[derive(Debug, Default)]
pub struct OracleStats {
    pub instances: usize,
    pub unique: usize,
    pub unique_agreed: usize,
    pub ambiguous: usize,
    pub ambiguous_reported: usize,
    pub failures: Vec<String>,
}

fn as_map(m: &NominalMapping) -> BTreeMap<String, String> {
    m.bound().into_iter().collect()
}

pub fn oracle(trials: usize, seed: u64) -> OracleStats {
    let mut r = rng(seed);
    let mut st = OracleStats { instances: trials, ..Default::default() };
    for i in 0..trials {
        let pair = synthetic_pair(&mut r);
        let solutions = brute_force_mappings(&pair.master, &pair.servant);
        let ours = nominal_resolution(&pair.master, &pair.servant);
        let ctx = || format!("#{i}\nmaster\n{}\nservant\n{}", pair.master, pair.servant);
        match solutions.len() {
            0 => st.failures.push(format!("{}: the planted mapping is no solution", ctx())),
            1 => {
                st.unique += 1;
                match &ours {
                    Ok(m) if as_map(m) == solutions[0] && m.is_functional() => st.unique_agreed += 1,
                    Ok(m) => st.failures.push(format!("{}: oracle {:?}, resolved {m}", ctx(), solutions[0])),
                    Err(e) => st.failures.push(format!("{}: oracle {:?}, error {e}", ctx(), solutions[0])),
                }
            }
            k => {
                st.ambiguous += 1;
                match &ours {
                    Err(ConvergeError::Ambiguity { candidates, .. }) => {
                        let cands: BTreeSet<BTreeMap<String, String>> = candidates.iter().map(as_map).collect();
                        let want: BTreeSet<BTreeMap<String, String>> = solutions.iter().cloned().collect();
                        if cands == want {
                            st.ambiguous_reported += 1;
                        } else {
                            st.failures.push(format!("{}: {k} solutions, candidates differ", ctx()));
                        }
                    }
                    Ok(m) => st.failures.push(format!("{}: {k} solutions, silently resolved to {m}", ctx())),
                    Err(e) => st.failures.push(format!("{}: {k} solutions, error {e}", ctx())),
                }
            }
        }
    }
    st
}

#[derive(Debug, Default)]
pub struct RenameStats {
    pub trials: usize,
    pub failures: Vec<String>,
}

/// Rename one servant nonterminal at a time and compare mappings.
pub fn rename_invariance(master: &Grammar, servant: &Grammar, trials: usize, seed: u64) -> RenameStats {
    let mut r = rng(seed);
    let base = nominal_resolution(master, servant).expect("the unrenamed case resolves");
    let names = servant.names_in_order();
    let master_names = master.names_in_order();
    let mut st = RenameStats { trials, ..Default::default() };
    for t in 0..trials {
        let from = names.choose(&mut r).unwrap().clone();
        // sometimes borrow a master name, to tempt the identical-name preference
        let to = loop {
            let cand = if r.gen_bool(0.3) {
                master_names.choose(&mut r).unwrap().clone()
            } else {
                format!("N{}", r.gen_range(0..1000))
            };
            if !names.contains(&cand) {
                break cand;
            }
        };
        let step = Step::Rename { from: from.clone(), to: to.clone() };
        let renamed = step.apply(servant).expect("fresh rename applies");
        let want = base.rename_servant(&from, &to);
        match nominal_resolution(master, &renamed) {
            Ok(m) if m == want => {}
            Ok(m) => st.failures.push(format!("trial {t} {step}: expected {want}, got {m}")),
            Err(e) => st.failures.push(format!("trial {t} {step}: {e}")),
        }
    }
    st
}

/// Construct census: whether some rule still has a subexpression that would
/// need group brackets, and whether it has separator lists.
pub fn census(g: &Grammar) -> (bool, bool) {
    let groups = g.productions.iter().any(|p| gramconv::mutate::foldable(&p.rhs).is_some());
    let seplists = g
        .productions
        .iter()
        .any(|p| p.rhs.any_node(&|x| matches!(x, X::SepListStar(..) | X::SepListPlus(..))));
    (groups, seplists)
}
