use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grammar::Grammar;
use crate::transform::Step;

/// Naming convention for disciplined renaming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `FOO_BAR`
    Upper,
    /// `foo_bar`
    Lower,
    /// `FooBar`
    Camel,
    /// `foo-bar`
    DashLower,
}

impl Convention {
    pub const ALL: [Convention; 4] = [Convention::Upper, Convention::Lower, Convention::Camel, Convention::DashLower];

    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Upper => "upper",
            Convention::Lower => "lower",
            Convention::Camel => "camel",
            Convention::DashLower => "dash-lower",
        }
    }

    /// Convert `name`; a name without any word characters is returned as is.
    ///
    /// One conversion can create new word boundaries (`x-1a` becomes
    /// `X_1A`, which splits as `X 1 A`), so conversion repeats until stable.
    pub fn apply(self, name: &str) -> String {
        let mut cur = name.to_string();
        for _ in 0..16 {
            let next = self.convert_once(&cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    fn convert_once(self, name: &str) -> String {
        let words = split_words(name);
        if words.is_empty() {
            return name.to_string();
        }
        match self {
            Convention::Upper => words.iter().map(|w| w.to_uppercase()).collect::<Vec<_>>().join("_"),
            Convention::Lower => words.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>().join("_"),
            Convention::DashLower => words.iter().map(|w| w.to_lowercase()).collect::<Vec<_>>().join("-"),
            Convention::Camel => {
                // a one-letter word would fuse with its capitalized successor
                // and not split again, so it joins the next word up front
                let mut merged: Vec<String> = Vec::new();
                let mut carry = String::new();
                for w in words {
                    carry.push_str(&w);
                    if carry.chars().count() > 1 || !carry.chars().all(char::is_alphabetic) {
                        merged.push(std::mem::take(&mut carry));
                    }
                }
                if !carry.is_empty() {
                    merged.push(carry);
                }
                merged
                    .iter()
                    .map(|w| {
                        let mut cs = w.chars();
                        let first = cs.next().unwrap();
                        first.to_uppercase().chain(cs.flat_map(|c| c.to_lowercase())).collect::<String>()
                    })
                    .collect()
            }
        }
    }

    pub fn satisfied_by(self, name: &str) -> bool {
        self.apply(name) == name
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Convention::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown naming convention `{s}` (expected upper, lower, camel or dash-lower)"))
    }
}

/// Split on `-`, `_`, whitespace and lower/digit-to-upper transitions.
pub fn split_words(name: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for c in name.chars() {
        if c == '-' || c == '_' || c.is_whitespace() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            if c.is_uppercase() && (p.is_lowercase() || p.is_ascii_digit()) && !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
        prev = Some(c);
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// `base_k` for the smallest `k ≥ 1` not in `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    (1..).map(|k| format!("{base}_{k}")).find(|n| !taken.contains(n)).unwrap()
}

/// Rename steps realising the injective map `pairs` (current name → new
/// name) on `g`. Blocked targets are freed by first moving their current
/// holder to a fresh temporary name; holders that are not themselves being
/// renamed keep that fresh name.
pub fn plan_renames(g: &Grammar, pairs: &[(String, String)]) -> Vec<Step> {
    let mut present = g.names();
    let mut pending: Vec<(String, String)> =
        pairs.iter().filter(|(a, b)| a != b && present.contains(a)).cloned().collect();
    let targets: BTreeSet<String> = pending.iter().map(|(_, b)| b.clone()).collect();
    let mut steps = Vec::new();
    let rename = |from: &str, to: &str, present: &mut BTreeSet<String>, steps: &mut Vec<Step>| {
        present.remove(from);
        present.insert(to.to_string());
        steps.push(Step::Rename { from: from.to_string(), to: to.to_string() });
    };
    while !pending.is_empty() {
        if let Some(i) = pending.iter().position(|(_, b)| !present.contains(b)) {
            let (a, b) = pending.remove(i);
            rename(&a, &b, &mut present, &mut steps);
            continue;
        }
        let holder = pending[0].1.clone();
        let mut taken = present.clone();
        taken.extend(targets.iter().cloned());
        let tmp = fresh_name(&holder, &taken);
        rename(&holder, &tmp, &mut present, &mut steps);
        for (a, _) in pending.iter_mut() {
            if *a == holder {
                *a = tmp.clone();
            }
        }
    }
    steps
}
