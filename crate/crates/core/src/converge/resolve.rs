use std::collections::{BTreeMap, BTreeSet};

use crate::grammar::{Grammar, Production};

use super::sig::{kinds_agree, pair_resolution, strong_equiv, symbols_in_order, weak_equiv, Strength};
use super::{ConvergeError, Name, NominalMapping};

const NODE_BUDGET: usize = 1_000_000;

/// One way of pairing a servant production with a master production.
#[derive(Clone, Debug)]
struct Pairing {
    master: usize,
    /// servant → master bindings, lhs included
    binds: Vec<(String, String)>,
    /// every signature entry on both sides is matched
    exact: bool,
}

struct Search {
    options: Vec<Vec<Pairing>>,
    nodes: usize,
    best: Option<(usize, usize)>,
    winners: Vec<BTreeMap<String, String>>,
}

fn options_for(p: &Production, master: &Grammar) -> Vec<Pairing> {
    let mut out = Vec::new();
    for (j, q) in master.productions.iter().enumerate() {
        let mut cands: Vec<(NominalMapping, bool)> = Vec::new();
        if strong_equiv(p, q) {
            for m in pair_resolution(p, q, Strength::Strong).unwrap_or_default() {
                cands.push((m, true));
            }
        }
        if weak_equiv(p, q) {
            for m in pair_resolution(p, q, Strength::Weak).unwrap_or_default() {
                let exact = m.pairs().iter().all(|(a, b)| *a != Name::Omega && *b != Name::Omega);
                cands.push((m, exact));
            }
        }
        for (m, exact) in cands {
            let mut binds: Vec<(String, String)> = vec![(p.lhs.clone(), q.lhs.clone())];
            for (a, b) in m.pairs() {
                if let (Name::Sym(a), Name::Sym(b)) = (a, b) {
                    binds.push((a, b));
                }
            }
            binds.sort();
            binds.dedup();
            if consistent(&binds, &BTreeMap::new(), &BTreeMap::new()) && !out.iter().any(|o: &Pairing| o.master == j && o.binds == binds) {
                out.push(Pairing { master: j, binds, exact });
            }
        }
    }
    out
}

fn consistent(binds: &[(String, String)], fwd: &BTreeMap<String, String>, back: &BTreeMap<String, String>) -> bool {
    let mut f = fwd.clone();
    let mut b = back.clone();
    for (x, y) in binds {
        if !kinds_agree(x, y) {
            return false;
        }
        if f.get(x).is_some_and(|v| v != y) || b.get(y).is_some_and(|v| v != x) {
            return false;
        }
        f.insert(x.clone(), y.clone());
        b.insert(y.clone(), x.clone());
    }
    true
}

#[derive(Clone)]
struct State {
    fwd: BTreeMap<String, String>,
    back: BTreeMap<String, String>,
    used_master: BTreeSet<usize>,
    assigned: Vec<bool>,
    pairs: usize,
    exact: usize,
}

impl Search {
    fn live(&self, st: &State, i: usize) -> Vec<usize> {
        self.options[i]
            .iter()
            .enumerate()
            .filter(|(_, o)| !st.used_master.contains(&o.master) && consistent(&o.binds, &st.fwd, &st.back))
            .map(|(k, _)| k)
            .collect()
    }

    fn run(&mut self, st: &mut State) -> Result<(), ConvergeError> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(ConvergeError::Ambiguity {
                candidates: vec![],
                reason: format!("search exceeded {NODE_BUDGET} nodes"),
            });
        }
        let mut pick: Option<(usize, Vec<usize>)> = None;
        let mut open = 0;
        for i in 0..self.options.len() {
            if st.assigned[i] {
                continue;
            }
            let live = self.live(st, i);
            if live.is_empty() {
                continue;
            }
            open += 1;
            if pick.as_ref().is_none_or(|(_, l)| live.len() < l.len()) {
                pick = Some((i, live));
            }
        }
        let bound = (st.pairs + open, st.exact + open);
        if let Some(best) = self.best {
            if bound < best {
                return Ok(());
            }
        }
        let Some((i, live)) = pick else {
            let score = (st.pairs, st.exact);
            if self.best.is_none_or(|b| score > b) {
                self.best = Some(score);
                self.winners.clear();
            }
            if self.best == Some(score) && !self.winners.contains(&st.fwd) {
                self.winners.push(st.fwd.clone());
            }
            return Ok(());
        };
        st.assigned[i] = true;
        for k in live {
            let o = self.options[i][k].clone();
            let mut next = st.clone();
            for (x, y) in &o.binds {
                next.fwd.insert(x.clone(), y.clone());
                next.back.insert(y.clone(), x.clone());
            }
            next.used_master.insert(o.master);
            next.pairs += 1;
            next.exact += o.exact as usize;
            self.run(&mut next)?;
        }
        self.run(st)?;
        st.assigned[i] = false;
        Ok(())
    }
}

/// Names of a grammar's vocabulary in order of first appearance, values
/// included.
fn vocabulary_in_order(g: &Grammar) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in &g.productions {
        for n in std::iter::once(p.lhs.clone()).chain(symbols_in_order(&p.rhs)) {
            if !out.contains(&n) {
                out.push(n);
            }
        }
    }
    out
}

fn complete(fwd: &BTreeMap<String, String>, servant: &Grammar, master: &Grammar) -> NominalMapping {
    let master_names = vocabulary_in_order(master);
    let mut taken: BTreeSet<String> = fwd.values().cloned().collect();
    let mut pairs: Vec<(Name, Name)> = Vec::new();
    for n in vocabulary_in_order(servant) {
        let target = match fwd.get(&n) {
            Some(m) => Name::Sym(m.clone()),
            None if master_names.contains(&n) && !taken.contains(&n) => {
                taken.insert(n.clone());
                Name::Sym(n.clone())
            }
            None => Name::Omega,
        };
        pairs.push((Name::Sym(n), target));
    }
    for m in master_names {
        if !taken.contains(&m) {
            pairs.push((Name::Omega, Name::Sym(m)));
        }
    }
    NominalMapping::from_pairs(pairs)
}

/// Infer the correspondence between the vocabularies of `servant` and
/// `master`.
///
/// Productions are paired one-to-one so that each pair is prodsig-equivalent
/// and all induced name bindings agree. The pairing with the most pairs, then
/// the most pairs matched entry for entry, then the fewest unmatched names
/// wins. Remaining ties go to the mapping with most identical names; if that
/// still leaves several mappings the result is an ambiguity error.
pub fn nominal_resolution(master: &Grammar, servant: &Grammar) -> Result<NominalMapping, ConvergeError> {
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    match (servant.roots.len(), master.roots.len()) {
        (1, 1) => {
            let (s, m) = (&servant.roots[0], &master.roots[0]);
            fwd.insert(s.clone(), m.clone());
            back.insert(m.clone(), s.clone());
        }
        (a, b) if a > 0 && b > 0 && a != b => {
            return Err(ConvergeError::Inconsistent {
                detail: format!("servant roots {} cannot correspond to master roots {}", servant.roots.join(", "), master.roots.join(", ")),
            })
        }
        _ => {}
    }
    let options: Vec<Vec<Pairing>> = servant.productions.iter().map(|p| options_for(p, master)).collect();
    let n = options.len();
    let mut search = Search { options, nodes: 0, best: None, winners: Vec::new() };
    let mut st = State { fwd, back, used_master: BTreeSet::new(), assigned: vec![false; n], pairs: 0, exact: 0 };
    search.run(&mut st)?;

    let mut mappings: Vec<NominalMapping> = Vec::new();
    for w in &search.winners {
        let m = complete(w, servant, master);
        if !mappings.contains(&m) {
            mappings.push(m);
        }
    }
    let omegas = |m: &NominalMapping| m.pairs().iter().filter(|(a, b)| *a == Name::Omega || *b == Name::Omega).count();
    let fewest = mappings.iter().map(omegas).min().unwrap_or(0);
    mappings.retain(|m| omegas(m) == fewest);
    let identical = |m: &NominalMapping| m.pairs().iter().filter(|(a, b)| a == b).count();
    let most = mappings.iter().map(identical).max().unwrap_or(0);
    mappings.retain(|m| identical(m) == most);
    match mappings.len() {
        0 => Ok(complete(&BTreeMap::new(), servant, master)),
        1 => Ok(mappings.pop().unwrap()),
        _ => Err(ConvergeError::Ambiguity {
            reason: format!("{} mappings are equally good", mappings.len()),
            candidates: mappings,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::Expression as X;

    #[test]
    fn identity_on_itself() {
        let g = Grammar::new(
            vec!["a".into()],
            vec![
                Production::new("a", X::seq([X::n("b"), X::star(X::n("c"))])),
                Production::new("b", X::ValueStr),
                Production::new("c", X::seq([X::n("b"), X::n("b")])),
            ],
        );
        let m = nominal_resolution(&g, &g).unwrap();
        assert!(m.pairs().iter().all(|(a, b)| a == b), "{m}");
        assert_eq!(m.pairs().len(), 4);
    }

    #[test]
    fn symmetric_rules_are_ambiguous() {
        let s = Grammar::new(vec![], vec![Production::new("A", X::seq([X::n("B"), X::n("C")]))]);
        let m = Grammar::new(vec![], vec![Production::new("a", X::seq([X::n("b"), X::n("c")]))]);
        // strong renaming B→b, C→c competes with the weak B→c, C→b
        assert!(matches!(nominal_resolution(&m, &s), Err(ConvergeError::Ambiguity { .. })));
    }

    #[test]
    fn unmatched_names_get_omega() {
        let s = Grammar::new(vec![], vec![Production::new("A", X::plus(X::n("B"))), Production::new("Z", X::ValueInt)]);
        let m = Grammar::new(vec![], vec![Production::new("a", X::star(X::n("b")))]);
        let r = nominal_resolution(&m, &s).unwrap();
        assert_eq!(r.to_string(), "{⟨A, a⟩, ⟨B, b⟩, ⟨Z, ω⟩, ⟨int, ω⟩}");
    }
}
