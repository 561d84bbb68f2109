use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::grammar::{Expression, Grammar, Production};

use super::{ConvergeError, Name, NominalMapping};

/// Multiset over the occurrence markers `1 ? + *`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Footprint {
    pub one: u32,
    pub opt: u32,
    pub plus: u32,
    pub star: u32,
}

impl Footprint {
    pub fn is_empty(&self) -> bool {
        self.one + self.opt + self.plus + self.star == 0
    }

    pub fn len(&self) -> u32 {
        self.one + self.opt + self.plus + self.star
    }

    pub fn union(self, o: Footprint) -> Footprint {
        Footprint { one: self.one + o.one, opt: self.opt + o.opt, plus: self.plus + o.plus, star: self.star + o.star }
    }

    /// `+` counted as `*`.
    pub fn weakened(self) -> Footprint {
        Footprint { plus: 0, star: self.star + self.plus, ..self }
    }

    /// Equality up to repetition kind.
    pub fn approx(self, o: Footprint) -> bool {
        self.weakened() == o.weakened()
    }

    pub fn parse(s: &str) -> Option<Footprint> {
        let mut f = Footprint::default();
        for c in s.chars() {
            match c {
                '1' => f.one += 1,
                '?' => f.opt += 1,
                '+' => f.plus += 1,
                '*' => f.star += 1,
                _ => return None,
            }
        }
        Some(f)
    }
}

impl fmt::Display for Footprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, k) in [('1', self.one), ('?', self.opt), ('+', self.plus), ('*', self.star)] {
            for _ in 0..k {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Footprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Name of a nonterminal or value symbol, or `None` for anything else.
pub(crate) fn symbol(e: &Expression) -> Option<&str> {
    match e {
        Expression::Nonterminal(n) => Some(n),
        Expression::ValueStr => Some("str"),
        Expression::ValueInt => Some("int"),
        _ => None,
    }
}

pub(crate) fn is_value_name(n: &str) -> bool {
    n == "str" || n == "int"
}

fn strip(mut e: &Expression) -> &Expression {
    loop {
        match e {
            Expression::Selectable(_, b) | Expression::Optional(b) | Expression::Star(b) | Expression::Plus(b) => e = b,
            _ => return e,
        }
    }
}

/// Occurrence markers of `n` in `x`. A repetition counts only when its
/// operand is `n` itself, possibly under further repetitions, and the
/// outermost marker wins. Choices contribute nothing.
pub fn footprint(n: &str, x: &Expression) -> Footprint {
    let marker = |b: &Expression| symbol(strip(b)) == Some(n);
    match x {
        _ if symbol(x) == Some(n) => Footprint { one: 1, ..Default::default() },
        Expression::Optional(b) if marker(b) => Footprint { opt: 1, ..Default::default() },
        Expression::Plus(b) if marker(b) => Footprint { plus: 1, ..Default::default() },
        Expression::Star(b) if marker(b) => Footprint { star: 1, ..Default::default() },
        Expression::Selectable(_, b) => footprint(n, b),
        Expression::Sequence(parts) => parts.iter().fold(Footprint::default(), |acc, p| acc.union(footprint(n, p))),
        _ => Footprint::default(),
    }
}

/// Names of nonterminals and values occurring in `x`, in order of first
/// occurrence.
pub(crate) fn symbols_in_order(x: &Expression) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    x.walk(&mut |e| {
        if let Some(s) = symbol(e) {
            if !out.iter().any(|o| o == s) {
                out.push(s.to_string());
            }
        }
    });
    out
}

/// Production signature: every name with a non-empty footprint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProdSig(pub BTreeMap<String, Footprint>);

impl ProdSig {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: &str) -> Option<Footprint> {
        self.0.get(n).copied()
    }
}

impl fmt::Display for ProdSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(n, fp)| format!("⟨{n}, {fp}⟩")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn prodsig(p: &Production) -> ProdSig {
    ProdSig(
        symbols_in_order(&p.rhs)
            .into_iter()
            .map(|n| {
                let fp = footprint(&n, &p.rhs);
                (n, fp)
            })
            .filter(|(_, fp)| !fp.is_empty())
            .collect(),
    )
}

/// Match `a` onto `b` node by node, extending the bijective renaming in
/// `fwd`/`back`. Values only match themselves.
fn rename_onto(
    a: &Expression,
    b: &Expression,
    fwd: &mut BTreeMap<String, String>,
    back: &mut BTreeMap<String, String>,
) -> bool {
    use Expression::*;
    match (a, b) {
        (Nonterminal(x), Nonterminal(y)) => {
            let f = fwd.entry(x.clone()).or_insert_with(|| y.clone()).clone();
            let r = back.entry(y.clone()).or_insert_with(|| x.clone()).clone();
            f == *y && r == *x
        }
        (Selectable(s, x), Selectable(t, y)) => s == t && rename_onto(x, y, fwd, back),
        (Sequence(xs), Sequence(ys)) | (Choice(xs), Choice(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| rename_onto(x, y, fwd, back))
        }
        (Optional(x), Optional(y)) | (Star(x), Star(y)) | (Plus(x), Plus(y)) => rename_onto(x, y, fwd, back),
        (SepListStar(x, s), SepListStar(y, t)) | (SepListPlus(x, s), SepListPlus(y, t)) => {
            rename_onto(x, y, fwd, back) && rename_onto(s, t, fwd, back)
        }
        (Nonterminal(_), _) | (_, Nonterminal(_)) => false,
        _ => std::mem::discriminant(a) == std::mem::discriminant(b) && a.children().is_empty() && a == b,
    }
}

/// The renaming of `p`'s right-hand side onto `q`'s, when one exists.
pub(crate) fn structural_renaming(p: &Production, q: &Production) -> Option<BTreeMap<String, String>> {
    let (mut fwd, mut back) = (BTreeMap::new(), BTreeMap::new());
    rename_onto(&p.rhs, &q.rhs, &mut fwd, &mut back).then_some(fwd)
}

/// Strong equivalence: one right-hand side is a bijective renaming of the
/// other, so every name has exactly one counterpart with the same footprint.
pub fn strong_equiv(p: &Production, q: &Production) -> bool {
    structural_renaming(p, q).is_some()
}

fn covered(a: &ProdSig, b: &ProdSig) -> bool {
    a.0.values().all(|fp| b.0.values().any(|g| fp.approx(*g)))
}

/// Weak equivalence: every footprint has a counterpart on the other side,
/// with `+` and `*` identified.
pub fn weak_equiv(p: &Production, q: &Production) -> bool {
    let (a, b) = (prodsig(p), prodsig(q));
    covered(&a, &b) && covered(&b, &a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Strong,
    Weak,
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Strong => "strong",
            Strength::Weak => "weak",
        })
    }
}

/// The strongest equivalence between `p` and `q`.
pub fn equivalence(p: &Production, q: &Production) -> Option<Strength> {
    if strong_equiv(p, q) {
        Some(Strength::Strong)
    } else if weak_equiv(p, q) {
        Some(Strength::Weak)
    } else {
        None
    }
}

pub(crate) fn kinds_agree(a: &str, b: &str) -> bool {
    match (is_value_name(a), is_value_name(b)) {
        (false, false) => true,
        (true, true) => a == b,
        _ => false,
    }
}

/// Name resolutions induced by pairing `p` with `q`.
///
/// Strong: the one renaming of right-hand sides. Weak: every
/// inclusion-maximal one-to-one matching of signature entries with
/// equivalent footprints and compatible kinds, leftovers paired with ω.
pub fn pair_resolution(p: &Production, q: &Production, strength: Strength) -> Result<Vec<NominalMapping>, ConvergeError> {
    let not_equiv = || ConvergeError::NotEquivalent { left: p.to_string(), right: q.to_string(), strength };
    match strength {
        Strength::Strong => {
            let f = structural_renaming(p, q).ok_or_else(not_equiv)?;
            let pairs = symbols_in_order(&p.rhs).into_iter().map(|a| {
                let b = f.get(&a).cloned().unwrap_or_else(|| a.clone());
                (Name::from(a), Name::from(b))
            });
            Ok(vec![NominalMapping::from_pairs(pairs)])
        }
        Strength::Weak => {
            if !weak_equiv(p, q) {
                return Err(not_equiv());
            }
            Ok(weak_matchings(&prodsig(p), &prodsig(q)).into_iter().map(|m| resolution_of(&m, &prodsig(p), &prodsig(q))).collect())
        }
    }
}

/// All inclusion-maximal matchings between the entries of `a` and `b`.
pub(crate) fn weak_matchings(a: &ProdSig, b: &ProdSig) -> Vec<BTreeSet<(String, String)>> {
    let left: Vec<(&String, &Footprint)> = a.0.iter().collect();
    let right: Vec<(&String, &Footprint)> = b.0.iter().collect();
    let mut all = Vec::new();
    let mut used = vec![false; right.len()];
    let mut cur = Vec::new();
    fn go<'a>(
        i: usize,
        left: &[(&'a String, &'a Footprint)],
        right: &[(&'a String, &'a Footprint)],
        used: &mut Vec<bool>,
        cur: &mut Vec<(String, String)>,
        all: &mut Vec<BTreeSet<(String, String)>>,
    ) {
        if i == left.len() {
            all.push(cur.iter().cloned().collect());
            return;
        }
        let (n, fp) = left[i];
        for (j, (m, g)) in right.iter().enumerate() {
            if !used[j] && fp.approx(**g) && kinds_agree(n, m) {
                used[j] = true;
                cur.push((n.clone(), (*m).clone()));
                go(i + 1, left, right, used, cur, all);
                cur.pop();
                used[j] = false;
            }
        }
        go(i + 1, left, right, used, cur, all);
    }
    go(0, &left, &right, &mut used, &mut cur, &mut all);
    let maximal: Vec<_> = all.iter().filter(|m| !all.iter().any(|o| o.len() > m.len() && m.is_subset(o))).cloned().collect();
    let mut out: Vec<BTreeSet<(String, String)>> = Vec::new();
    for m in maximal {
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

fn resolution_of(m: &BTreeSet<(String, String)>, a: &ProdSig, b: &ProdSig) -> NominalMapping {
    let mut pairs: Vec<(Name, Name)> = m.iter().map(|(x, y)| (Name::from(x.clone()), Name::from(y.clone()))).collect();
    for n in a.0.keys().filter(|n| !m.iter().any(|(x, _)| x == *n)) {
        pairs.push((Name::from(n.clone()), Name::Omega));
    }
    for n in b.0.keys().filter(|n| !m.iter().any(|(_, y)| y == *n)) {
        pairs.push((Name::Omega, Name::from(n.clone())));
    }
    NominalMapping::from_pairs(pairs)
}

/// Footprint statistics of a grammar.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SigMetrics {
    /// One signature per production.
    pub signatures: usize,
    /// Signature entries over all productions.
    pub entries: usize,
    pub distinct_footprints: usize,
    /// Number of signature entries carrying each footprint.
    pub footprint_frequency: BTreeMap<String, usize>,
    /// Signature sizes of the rules of each nonterminal, in rule order.
    pub signature_sizes: BTreeMap<String, Vec<usize>>,
}

pub fn sig_metrics(g: &Grammar) -> SigMetrics {
    let mut m = SigMetrics::default();
    let mut freq: BTreeMap<Footprint, usize> = BTreeMap::new();
    for p in &g.productions {
        let s = prodsig(p);
        m.signatures += 1;
        m.entries += s.len();
        for fp in s.0.values() {
            *freq.entry(*fp).or_default() += 1;
        }
        m.signature_sizes.entry(p.lhs.clone()).or_default().push(s.len());
    }
    m.distinct_footprints = freq.len();
    m.footprint_frequency = freq.into_iter().map(|(fp, k)| (fp.to_string(), k)).collect();
    m
}

/// Two-column listing of productions with their signatures.
pub fn prodsig_table(g: &Grammar) -> String {
    let rows: Vec<(String, String)> = g
        .productions
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("p_{}  {}", i + 1, p), prodsig(p).to_string()))
        .collect();
    let width = rows.iter().map(|(a, _)| a.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (a, b) in rows {
        let pad = width - a.chars().count();
        out.push_str(&format!("{a}{}  {b}\n", " ".repeat(pad)));
    }
    out
}
