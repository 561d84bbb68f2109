//! One line per acceptance criterion. Runs without the test harness so the
//! lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use gramconv::converge::{guided_converge, nominal_resolution, prodsig, structural_match, Footprint, Strength};
use gramconv::grammar::{Grammar, Production};
use gramconv::mutate::{mutate, Mutation};

use common::expected::{jaxb_anf, master_prodsigs, match_table, published_mapping};
use common::fixture;
use common::suites::{idempotence, invertibility, oracle, rename_invariance, roundtrip_failures};

struct Verdict {
    criterion: u8,
    /// `None` for a substituted criterion
    pass: Option<bool>,
    detail: String,
}

fn verdict(criterion: u8, pass: bool, detail: String) -> Verdict {
    Verdict { criterion, pass: Some(pass), detail }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn prodsigs() -> Verdict {
    let g = fixture("fl/master.json");
    let t = Instant::now();
    let rows: Vec<BTreeSet<(String, Footprint)>> = g.productions.iter().map(|p| prodsig(p).0.into_iter().collect()).collect();
    let took = t.elapsed();
    let expected = master_prodsigs();
    let ok = expected
        .iter()
        .zip(&rows)
        .zip(&g.productions)
        .filter(|(((lhs, want), got), p)| p.lhs == *lhs && want.iter().cloned().collect::<BTreeSet<_>>() == **got)
        .count();
    let pass = ok == 10 && rows.len() == 10 && took < Duration::from_secs(1);
    verdict(1, pass, format!("prodsig rows {ok}/10 exact, {}", ms(took)))
}

fn anf() -> Verdict {
    let raw = fixture("fl/jaxb-extract.json");
    let t = Instant::now();
    let res = mutate(&raw, &Mutation::NormalizeAnf);
    let took = t.elapsed();
    let want = Grammar::new(vec!["Program".into()], jaxb_anf());
    match res {
        Ok(r) => {
            let same = r.grammar.eq_unordered(&want);
            verdict(2, same && took < Duration::from_secs(1), format!(
                "normalize-anf gives {} productions, equal to the expected 10: {same}, {}",
                r.grammar.productions.len(),
                ms(took)
            ))
        }
        Err(e) => verdict(2, false, format!("normalize-anf failed: {e}")),
    }
}

fn matches() -> Verdict {
    let master = fixture("fl/master-converge.json");
    let servant = Grammar::new(vec!["Program".into()], jaxb_anf());
    let mapping = match nominal_resolution(&master, &servant) {
        Ok(m) => m,
        Err(e) => return verdict(3, false, format!("resolution failed: {e}")),
    };
    let r = structural_match(&master, &servant, &mapping);
    let want = match_table();
    let got: Vec<(Production, Production, Strength)> =
        r.pair_matches.iter().map(|m| (m.servant.clone(), m.master.clone(), m.strength)).collect();
    let rows = want.iter().zip(&got).filter(|(a, b)| a == b).count();
    let (s, w) = (r.count(Strength::Strong), r.count(Strength::Weak));
    verdict(3, rows == 10 && got.len() == 10 && (s, w) == (6, 4), format!("{rows}/10 rows, {s} strong, {w} weak"))
}

fn mapping() -> Verdict {
    let master = fixture("fl/master-converge.json");
    match guided_converge(&master, &fixture("fl/jaxb-extract.json")) {
        Ok(r) => {
            let got: BTreeSet<_> = r.mapping.pairs().into_iter().collect();
            let want = published_mapping();
            verdict(4, got == want, format!("{} pairs, {} of the expected 9 present: {}", got.len(), got.intersection(&want).count(), r.mapping))
        }
        Err(e) => verdict(4, false, format!("guided_converge failed: {e}")),
    }
}

fn substituted() -> Verdict {
    Verdict {
        criterion: 5,
        pass: None,
        detail: "size-reduction measurements need external transformation scripts and tooling; replaced by the property suites 6 to 10".into(),
    }
}

fn first(failures: &[String]) -> String {
    failures.first().map(|f| format!("; first: {}", f.lines().next().unwrap_or(""))).unwrap_or_default()
}

fn inverses() -> Verdict {
    let st = invertibility(1000, 6);
    let checked: usize = st.checked.values().sum();
    verdict(6, st.failures.is_empty() && st.checked.len() == 11, format!(
        "{} grammars, {checked} round trips over {} operators, {} outside the bijective domain, {} failures{}",
        st.grammars,
        st.checked.len(),
        st.refused,
        st.failures.len(),
        first(&st.failures)
    ))
}

fn idempotent() -> Verdict {
    let st = idempotence(1000, 7);
    let checked: usize = st.checked.values().sum();
    verdict(7, st.failures.is_empty() && st.checked.len() == 16, format!(
        "{} grammars, {} kinds, {checked} applications, {} ANF checks, {} failures{}",
        st.grammars,
        st.checked.len(),
        st.anf_checked,
        st.failures.len(),
        first(&st.failures)
    ))
}

fn roundtrip() -> Verdict {
    let f = roundtrip_failures(500, 8);
    verdict(8, f.is_empty(), format!("500 grammars, {} failures{}", f.len(), first(&f)))
}

fn oracle_agreement() -> Verdict {
    let st = oracle(1000, 9);
    let pass = st.failures.is_empty() && st.unique == st.unique_agreed && st.ambiguous == st.ambiguous_reported;
    verdict(9, pass, format!(
        "{} instances: {}/{} unique agree, {}/{} ambiguous reported, {} failures{}",
        st.instances,
        st.unique_agreed,
        st.unique,
        st.ambiguous_reported,
        st.ambiguous,
        st.failures.len(),
        first(&st.failures)
    ))
}

fn renames() -> Verdict {
    let st = rename_invariance(&fixture("fl/master-converge.json"), &fixture("fl/jaxb-anf.json"), 100, 10);
    verdict(10, st.failures.is_empty(), format!("{} renames, {} failures{}", st.trials, st.failures.len(), first(&st.failures)))
}

fn main() {
    let verdicts = [
        prodsigs(),
        anf(),
        matches(),
        mapping(),
        substituted(),
        inverses(),
        idempotent(),
        roundtrip(),
        oracle_agreement(),
        renames(),
    ];
    for v in &verdicts {
        let status = match v.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "substituted",
        };
        println!("criterion {:>2}: {status}: {}", v.criterion, v.detail);
    }
    let failed: Vec<u8> = verdicts.iter().filter(|v| v.pass == Some(false)).map(|v| v.criterion).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
