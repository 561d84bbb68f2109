use std::collections::{BTreeSet, VecDeque};

use crate::grammar::{Expression, Grammar};
use crate::mutate::plan_renames;
use crate::transform::Step;

use super::sig::{equivalence, is_value_name};
use super::{MatchReport, Name, NominalMapping, PairMatch, Residue, Side};

/// Steps rewriting `s` into `m` by the elementwise adjustments: star to
/// plus and back, and nonterminal to value.
fn align_elements(name: &str, s: &Expression, m: &Expression, out: &mut Vec<Step>) -> bool {
    use Expression::*;
    if s == m {
        return true;
    }
    match (s, m) {
        (Star(a), Plus(b)) if a == b => {
            out.push(Step::Narrow { name: name.to_string(), from: s.clone(), to: m.clone() });
            true
        }
        (Plus(a), Star(b)) if a == b => {
            out.push(Step::Widen { name: name.to_string(), from: s.clone(), to: m.clone() });
            true
        }
        (Nonterminal(x), v) if v.is_value() => {
            out.push(Step::Bind { name: x.clone(), value: v.clone() });
            true
        }
        (Sequence(xs), Sequence(ys)) | (Choice(xs), Choice(ys)) if xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| align_elements(name, x, y, out))
        }
        (Optional(a), Optional(b)) | (Star(a), Star(b)) | (Plus(a), Plus(b)) => align_elements(name, a, b, out),
        _ => false,
    }
}

/// Lexicographically smallest `order` (1-based servant positions per master
/// position) under which the servant parts align with the master parts.
fn find_order(name: &str, xs: &[Expression], ys: &[Expression]) -> Option<Vec<usize>> {
    fn go(name: &str, xs: &[Expression], ys: &[Expression], used: &mut Vec<bool>, order: &mut Vec<usize>) -> bool {
        let k = order.len();
        if k == ys.len() {
            return true;
        }
        for i in 0..xs.len() {
            if used[i] || !align_elements(name, &xs[i], &ys[k], &mut Vec::new()) {
                continue;
            }
            used[i] = true;
            order.push(i + 1);
            if go(name, xs, ys, used, order) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
        false
    }
    let mut order = Vec::new();
    go(name, xs, ys, &mut vec![false; xs.len()], &mut order).then_some(order)
}

/// Steps turning the rule `name → s` into `name → m`, if the two differ
/// only in the ways structural matching accounts for.
fn align(name: &str, s: &Expression, m: &Expression) -> Option<Vec<Step>> {
    let mut steps = Vec::new();
    if align_elements(name, s, m, &mut steps) {
        return Some(steps);
    }
    let (Expression::Sequence(xs), Expression::Sequence(ys)) = (s, m) else { return None };
    if xs.len() != ys.len() {
        return None;
    }
    let order = find_order(name, xs, ys)?;
    let permuted: Vec<Expression> = order.iter().map(|&i| xs[i - 1].clone()).collect();
    steps.push(Step::Permute { name: name.to_string(), rhs: s.clone(), order });
    let ok = align_elements(name, &Expression::Sequence(permuted), m, &mut steps);
    debug_assert!(ok);
    Some(steps)
}

/// Master nonterminals in breadth-first order from the start symbols,
/// followed by the ones not reached.
fn bfs_order(g: &Grammar) -> Vec<String> {
    let graph = g.call_graph();
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    let mut starts: Vec<String> = g.defined_in_order().into_iter().filter(|n| g.start_symbols().contains(n)).collect();
    starts.extend(g.defined_in_order());
    for s in starts {
        if !seen.insert(s.clone()) {
            continue;
        }
        let mut queue = VecDeque::from([s]);
        while let Some(n) = queue.pop_front() {
            order.push(n.clone());
            for m in graph.get(&n).into_iter().flatten() {
                if g.is_defined(m) && seen.insert(m.clone()) {
                    queue.push_back(m.clone());
                }
            }
        }
    }
    order
}

/// Traverse `master` and `servant` in step, pairing the rules of
/// corresponding nonterminals and recording the steps that rewrite the
/// servant's shapes onto the master's.
pub fn structural_match(master: &Grammar, servant: &Grammar, mapping: &NominalMapping) -> MatchReport {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (a, b) in mapping.pairs() {
        if let (Name::Sym(a), Name::Sym(b)) = (a, b) {
            if !is_value_name(&a) && a != b {
                pairs.push((a, b));
            }
        }
    }
    let mut trace = plan_renames(servant, &pairs);
    let mut cur = crate::transform::apply_script(servant, &trace).expect("planned renames apply");

    let n_servant = servant.productions.len();
    let mut partner: Vec<Option<usize>> = vec![None; n_servant];
    let mut master_used = vec![false; master.productions.len()];
    let mut bound = Vec::new();

    for name in bfs_order(master) {
        let m_rules = master.rule_indices(&name);
        let s_rules = cur.rule_indices(&name);
        for &j in &m_rules {
            if let Some(&i) = s_rules.iter().find(|&&i| partner[i].is_none() && cur.productions[i].rhs == master.productions[j].rhs) {
                partner[i] = Some(j);
                master_used[j] = true;
            }
        }
        for &i in &s_rules {
            if partner[i].is_some() {
                continue;
            }
            for &j in &m_rules {
                if master_used[j] {
                    continue;
                }
                let Some(steps) = align(&name, &cur.productions[i].rhs, &master.productions[j].rhs) else { continue };
                let Ok(next) = crate::transform::apply_script(&cur, &steps) else { continue };
                if next.productions[i].rhs != master.productions[j].rhs {
                    continue;
                }
                for s in &steps {
                    if let Step::Bind { name, .. } = s {
                        bound.push(name.clone());
                    }
                }
                cur = next;
                trace.extend(steps);
                partner[i] = Some(j);
                master_used[j] = true;
                break;
            }
        }
    }

    // indices into `cur` stay valid; eliminations happen on a copy
    let mut eliminated = vec![false; n_servant];
    let mut tail = cur.clone();
    for b in bound {
        let step = Step::Eliminate { name: b.clone() };
        if tail.use_count(&b) > 0 {
            continue;
        }
        if let Ok(next) = step.apply(&tail) {
            for i in cur.rule_indices(&b) {
                eliminated[i] = true;
            }
            tail = next;
            trace.push(step);
        }
    }

    let mut matches = Vec::new();
    let mut residue = Vec::new();
    for (i, p) in servant.productions.iter().enumerate() {
        match partner[i] {
            Some(j) if cur.productions[i].rhs == master.productions[j].rhs => {
                let q = &master.productions[j];
                match equivalence(p, q) {
                    Some(strength) => matches.push(PairMatch { servant: p.clone(), master: q.clone(), strength }),
                    None => {
                        residue.push(Residue { side: Side::Servant, production: p.clone() });
                        master_used[j] = false;
                    }
                }
            }
            Some(j) => {
                residue.push(Residue { side: Side::Servant, production: p.clone() });
                master_used[j] = false;
            }
            None if eliminated[i] => {}
            None => residue.push(Residue { side: Side::Servant, production: p.clone() }),
        }
    }
    for (j, q) in master.productions.iter().enumerate() {
        if !master_used[j] {
            residue.push(Residue { side: Side::Master, production: q.clone() });
        }
    }

    let after = crate::transform::apply_script(servant, &trace).expect("recorded steps replay");
    let master_roots: BTreeSet<&String> = master.roots.iter().collect();
    let cur_roots: BTreeSet<&String> = after.roots.iter().collect();
    if master_roots != cur_roots && master.roots.iter().all(|r| after.is_defined(r)) && !master.roots.is_empty() {
        trace.push(Step::Reroot { roots: master.roots.clone() });
    }

    MatchReport {
        pair_matches: matches,
        mapping: mapping.clone(),
        residue,
        anf_trace: Vec::new(),
        structural_trace: trace,
        warnings: Vec::new(),
    }
}
