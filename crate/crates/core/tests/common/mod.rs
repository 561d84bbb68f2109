#![allow(dead_code)]

pub mod expected;
pub mod suites;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gramconv::grammar::{from_json, Expression as X, Grammar, Production};
use gramconv::metasyntax::{parse_spec, NotationSpec};

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn fixture_text(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn fixture(rel: &str) -> Grammar {
    from_json(&fixture_text(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn reference_spec() -> NotationSpec {
    parse_spec(&fixture_text("reference.edd")).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Knobs for [`random_grammar`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_productions: usize,
    pub max_depth: usize,
    pub labels: bool,
    pub selectors: bool,
    pub terminals: bool,
    pub seplists: bool,
    /// φ and α leaves
    pub special: bool,
}

impl Shape {
    /// Everything the expression algebra offers.
    pub const FULL: Shape = Shape {
        max_productions: 8,
        max_depth: 4,
        labels: true,
        selectors: true,
        terminals: true,
        seplists: true,
        special: true,
    };

    /// Only what a textual notation can express.
    pub const TEXTUAL: Shape = Shape {
        max_productions: 8,
        max_depth: 4,
        labels: false,
        selectors: false,
        terminals: true,
        seplists: true,
        special: false,
    };

    pub fn without_labels(self) -> Shape {
        Shape { labels: false, ..self }
    }
}

const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const TERMINALS: [&str; 4] = ["x", "y", ";", "if"];
const LABELS: [&str; 3] = ["l1", "l2", "l3"];
const SELECTORS: [&str; 3] = ["s", "t", "u"];

fn leaf(r: &mut ChaCha8Rng, shape: Shape, names: &[&str]) -> X {
    let roll = r.gen_range(0..100);
    match roll {
        0..=54 => X::n(*names.choose(r).unwrap()),
        55..=69 if shape.terminals => X::t(*TERMINALS.choose(r).unwrap()),
        55..=69 => X::n(*names.choose(r).unwrap()),
        70..=79 => X::ValueStr,
        80..=86 => X::ValueInt,
        87..=92 => X::Epsilon,
        93..=96 if shape.special => X::Empty,
        97..=99 if shape.special => X::Any,
        _ => X::n(*names.choose(r).unwrap()),
    }
}

pub fn random_expr(r: &mut ChaCha8Rng, depth: usize, shape: Shape, names: &[&str]) -> X {
    if depth <= 1 || r.gen_bool(0.3) {
        return leaf(r, shape, names);
    }
    let sub = |r: &mut ChaCha8Rng| random_expr(r, depth - 1, shape, names);
    match r.gen_range(0..9) {
        0 | 1 => {
            let k = r.gen_range(2..=3);
            X::seq((0..k).map(|_| sub(r)).collect::<Vec<_>>())
        }
        2 => {
            let k = r.gen_range(2..=3);
            X::choice((0..k).map(|_| sub(r)).collect::<Vec<_>>())
        }
        3 => X::opt(sub(r)),
        4 => X::star(sub(r)),
        5 => X::plus(sub(r)),
        6 if shape.seplists => {
            let (a, b) = (sub(r), sub(r));
            if r.gen_bool(0.5) {
                X::sepstar(a, b)
            } else {
                X::sepplus(a, b)
            }
        }
        7 if shape.selectors => X::sel(*SELECTORS.choose(r).unwrap(), sub(r)),
        _ => X::seq([sub(r), sub(r)]),
    }
}

/// A grammar with up to `shape.max_productions` rules over a small
/// vocabulary. Roots are the first lhs or empty.
pub fn random_grammar(r: &mut ChaCha8Rng, shape: Shape) -> Grammar {
    let k = r.gen_range(1..=shape.max_productions);
    let pool = &NAMES[..r.gen_range(2..=NAMES.len())];
    let mut prods = Vec::with_capacity(k);
    for _ in 0..k {
        let lhs = *pool.choose(r).unwrap();
        let depth = r.gen_range(1..=shape.max_depth);
        let rhs = random_expr(r, depth, shape, pool);
        let p = if shape.labels && r.gen_bool(0.15) {
            Production::labelled(*LABELS.choose(r).unwrap(), lhs, rhs)
        } else {
            Production::new(lhs, rhs)
        };
        prods.push(p);
    }
    let roots = if r.gen_bool(0.5) { vec![prods[0].lhs.clone()] } else { vec![] };
    Grammar::new(roots, prods)
}

/// A grammar the reference notation can write: roots are the first lhs, as
/// recovery reports them.
pub fn random_textual_grammar(r: &mut ChaCha8Rng) -> Grammar {
    let mut g = random_grammar(r, Shape::TEXTUAL);
    g.roots = vec![g.productions[0].lhs.clone()];
    g
}

/// The strings of at most `max_len` tokens derivable from `start`.
/// Terminals and values are tokens; an undefined nonterminal stands for
/// itself as a token `<n>`; α is the token `α`.
pub fn bounded_language(g: &Grammar, start: &str, max_len: usize) -> BTreeSet<Vec<String>> {
    let defined: BTreeSet<String> = g.productions.iter().map(|p| p.lhs.clone()).collect();
    let mut lang: BTreeMap<String, BTreeSet<Vec<String>>> = defined.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
    loop {
        let mut changed = false;
        for p in &g.productions {
            let words = eval(&p.rhs, &lang, &defined, max_len);
            let entry = lang.get_mut(&p.lhs).unwrap();
            for w in words {
                changed |= entry.insert(w);
            }
        }
        if !changed {
            break;
        }
    }
    if defined.contains(start) {
        lang.remove(start).unwrap()
    } else {
        BTreeSet::from([vec![format!("<{start}>")]])
    }
}

type Lang = BTreeSet<Vec<String>>;

fn concat(a: &Lang, b: &Lang, max_len: usize) -> Lang {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            if x.len() + y.len() <= max_len {
                let mut w = x.clone();
                w.extend(y.iter().cloned());
                out.insert(w);
            }
        }
    }
    out
}

fn closure(item: &Lang, max_len: usize, at_least_one: bool) -> Lang {
    let mut acc: Lang = item.clone();
    loop {
        let next = concat(&acc, item, max_len);
        let before = acc.len();
        acc.extend(next);
        if acc.len() == before {
            break;
        }
    }
    if !at_least_one {
        acc.insert(vec![]);
    }
    acc
}

fn eval(e: &X, lang: &BTreeMap<String, Lang>, defined: &BTreeSet<String>, max_len: usize) -> Lang {
    let one = |t: String| BTreeSet::from([vec![t]]);
    match e {
        X::Epsilon => BTreeSet::from([vec![]]),
        X::Empty => BTreeSet::new(),
        X::Any => one("α".into()),
        X::ValueStr => one("str".into()),
        X::ValueInt => one("int".into()),
        X::Terminal(t) => one(format!("'{t}'")),
        X::Nonterminal(n) if defined.contains(n) => lang[n].clone(),
        X::Nonterminal(n) => one(format!("<{n}>")),
        X::Selectable(_, b) => eval(b, lang, defined, max_len),
        X::Sequence(parts) => parts.iter().fold(BTreeSet::from([vec![]]), |acc, p| concat(&acc, &eval(p, lang, defined, max_len), max_len)),
        X::Choice(alts) => alts.iter().flat_map(|a| eval(a, lang, defined, max_len)).collect(),
        X::Optional(b) => {
            let mut l = eval(b, lang, defined, max_len);
            l.insert(vec![]);
            l
        }
        X::Star(b) => closure(&eval(b, lang, defined, max_len), max_len, false),
        X::Plus(b) => closure(&eval(b, lang, defined, max_len), max_len, true),
        X::SepListStar(i, s) | X::SepListPlus(i, s) => {
            let item = eval(i, lang, defined, max_len);
            let sep = eval(s, lang, defined, max_len);
            let tail = closure(&concat(&sep, &item, max_len), max_len, false);
            let mut l = concat(&item, &tail, max_len);
            if matches!(e, X::SepListStar(..)) {
                l.insert(vec![]);
            }
            l
        }
    }
}

/// A pair of grammars that are renamings of each other up to production
/// order and star/plus swaps. Servant names are upper case, master names
/// lower case, so no pair shares a name.
pub struct SyntheticPair {
    pub master: Grammar,
    pub servant: Grammar,
    /// servant → master
    pub planted: BTreeMap<String, String>,
}

pub fn synthetic_pair(r: &mut ChaCha8Rng) -> SyntheticPair {
    let vocab_size = r.gen_range(2..=6);
    let master_names: Vec<String> = (0..vocab_size).map(|i| format!("m{i}")).collect();
    let nonterminals = &master_names;
    // names that are only used; two of them with the same uses are
    // interchangeable, which makes the instance ambiguous
    let leaves = r.gen_range(0..=2).min(vocab_size - 1);
    let heads = &master_names[..vocab_size - leaves];
    let k = r.gen_range(heads.len().min(3)..=6);
    let mut prods = Vec::new();
    for i in 0..k {
        let lhs = heads[i % heads.len()].clone();
        let len = r.gen_range(1..=3);
        let parts: Vec<X> = (0..len)
            .map(|_| {
                let n = X::n(nonterminals.choose(r).unwrap().clone());
                match r.gen_range(0..8) {
                    0 => X::star(n),
                    1 => X::plus(n),
                    2 => X::opt(n),
                    _ => n,
                }
            })
            .collect();
        let mut rhs = X::seq(parts);
        // the value counts towards the vocabulary
        if vocab_size < 6 && r.gen_bool(0.15) {
            rhs = X::seq([rhs, X::ValueStr]);
        }
        prods.push(Production::new(lhs, rhs));
    }
    let used: BTreeSet<String> = prods.iter().flat_map(|p| p.rhs.nonterminals().into_iter().chain([p.lhs.clone()])).collect();
    let master = Grammar::new(vec![prods[0].lhs.clone()], prods);

    let mut targets: Vec<&String> = used.iter().collect();
    targets.shuffle(r);
    let planted: BTreeMap<String, String> =
        targets.iter().enumerate().map(|(i, m)| (format!("S{i}"), (*m).clone())).collect();
    let back: BTreeMap<&String, &String> = planted.iter().map(|(s, m)| (m, s)).collect();
    let mut sprods: Vec<Production> = master
        .productions
        .iter()
        .map(|p| {
            let mut rhs = p.rhs.clone();
            for (m, s) in &back {
                rhs = rhs.rename_nonterminal(m, s);
            }
            let rhs = rhs.map_bottom_up(&mut |x| match x {
                X::Star(b) if r.gen_bool(0.5) => X::Plus(b),
                X::Plus(b) if r.gen_bool(0.5) => X::Star(b),
                other => other,
            });
            Production::new(back[&p.lhs].clone(), rhs)
        })
        .collect();
    sprods.shuffle(r);
    let servant = Grammar::new(vec![back[&master.roots[0]].clone()], sprods);
    SyntheticPair { master, servant, planted }
}

fn weak_sig(p: &Production, f: &dyn Fn(&str) -> String) -> (String, Vec<(String, String)>) {
    let sig = gramconv::converge::prodsig(p);
    let mut entries: Vec<(String, String)> =
        sig.0.iter().map(|(n, fp)| (f(n), fp.weakened().to_string())).collect();
    entries.sort();
    (f(&p.lhs), entries)
}

/// Every injective map from the servant vocabulary into the master
/// vocabulary under which the servant's productions, signatures weakened,
/// are exactly the master's and roots go to roots.
pub fn brute_force_mappings(master: &Grammar, servant: &Grammar) -> Vec<BTreeMap<String, String>> {
    let vocab = |g: &Grammar| -> Vec<String> {
        let mut v: BTreeSet<String> = BTreeSet::new();
        for p in &g.productions {
            v.insert(p.lhs.clone());
            v.extend(gramconv::converge::prodsig(p).0.keys().cloned());
        }
        v.into_iter().collect()
    };
    let (sv, mv) = (vocab(servant), vocab(master));
    assert!(sv.len() <= 6 && mv.len() <= 6, "oracle limited to small vocabularies");
    let mut target_sigs: Vec<_> = master.productions.iter().map(|p| weak_sig(p, &|n| n.to_string())).collect();
    target_sigs.sort();
    let master_roots: BTreeSet<&String> = master.roots.iter().collect();

    let mut out = Vec::new();
    let mut assign: Vec<usize> = Vec::new();
    let mut used = vec![false; mv.len()];
    fn go(
        sv: &[String],
        mv: &[String],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        check: &mut dyn FnMut(&[usize]),
    ) {
        if assign.len() == sv.len() {
            check(assign);
            return;
        }
        let s = &sv[assign.len()];
        for j in 0..mv.len() {
            let value_s = s == "str" || s == "int";
            let value_m = mv[j] == "str" || mv[j] == "int";
            if used[j] || value_s != value_m || (value_s && *s != mv[j]) {
                continue;
            }
            used[j] = true;
            assign.push(j);
            go(sv, mv, assign, used, check);
            assign.pop();
            used[j] = false;
        }
    }
    let mut check = |a: &[usize]| {
        let f: BTreeMap<String, String> = sv.iter().cloned().zip(a.iter().map(|&j| mv[j].clone())).collect();
        let roots: BTreeSet<&String> = servant.roots.iter().map(|r| &f[r]).collect();
        if roots != master_roots {
            return;
        }
        let mut sigs: Vec<_> = servant.productions.iter().map(|p| weak_sig(p, &|n| f[n].clone())).collect();
        sigs.sort();
        if sigs == target_sigs {
            out.push(f);
        }
    };
    go(&sv, &mv, &mut assign, &mut used, &mut check);
    out
}
