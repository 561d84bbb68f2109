//! JSON interchange format.
//!
//! ```json
//! {"roots": ["a"], "productions": [{"label": null, "lhs": "a", "rhs": {"tag": "n", "name": "b"}}]}
//! ```
//!
//! Expressions are objects tagged by `"tag"`; decoded expressions go through
//! the normalising constructors, so non-canonical documents (a one-part
//! `seq`, say) decode to their canonical form.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};

use super::{Expression, Grammar, Production};

#[derive(Debug, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct DecodeError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Pretty-printed document with a trailing newline.
pub fn to_json(g: &Grammar) -> String {
    let mut s = serde_json::to_string_pretty(g).expect("grammar serialization cannot fail");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Grammar, DecodeError> {
    serde_json::from_str(text).map_err(|e| DecodeError {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use Expression::*;
        let mut m = s.serialize_map(None)?;
        match self {
            Epsilon => m.serialize_entry("tag", "epsilon")?,
            Empty => m.serialize_entry("tag", "empty")?,
            Any => m.serialize_entry("tag", "any")?,
            ValueStr => m.serialize_entry("tag", "valstr")?,
            ValueInt => m.serialize_entry("tag", "valint")?,
            Terminal(t) => {
                m.serialize_entry("tag", "t")?;
                m.serialize_entry("text", t)?;
            }
            Nonterminal(n) => {
                m.serialize_entry("tag", "n")?;
                m.serialize_entry("name", n)?;
            }
            Selectable(sel, body) => {
                m.serialize_entry("tag", "sel")?;
                m.serialize_entry("selector", sel)?;
                m.serialize_entry("body", body)?;
            }
            Sequence(parts) => {
                m.serialize_entry("tag", "seq")?;
                m.serialize_entry("parts", parts)?;
            }
            Choice(alts) => {
                m.serialize_entry("tag", "choice")?;
                m.serialize_entry("alternatives", alts)?;
            }
            Optional(b) | Star(b) | Plus(b) => {
                let tag = match self {
                    Optional(_) => "opt",
                    Star(_) => "star",
                    _ => "plus",
                };
                m.serialize_entry("tag", tag)?;
                m.serialize_entry("body", b)?;
            }
            SepListStar(item, sep) | SepListPlus(item, sep) => {
                let tag = if matches!(self, SepListStar(..)) { "sepstar" } else { "sepplus" };
                m.serialize_entry("tag", tag)?;
                m.serialize_entry("item", item)?;
                m.serialize_entry("separator", sep)?;
            }
        }
        m.end()
    }
}

#[derive(Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
enum WireExpr {
    Epsilon,
    Empty,
    Any,
    Valstr,
    Valint,
    T { text: String },
    N { name: String },
    Sel { selector: String, body: Expression },
    Seq { parts: Vec<Expression> },
    Choice { alternatives: Vec<Expression> },
    Opt { body: Expression },
    Star { body: Expression },
    Plus { body: Expression },
    Sepstar { item: Expression, separator: Expression },
    Sepplus { item: Expression, separator: Expression },
}

impl TryFrom<WireExpr> for Expression {
    type Error = String;

    fn try_from(w: WireExpr) -> Result<Self, String> {
        Ok(match w {
            WireExpr::Epsilon => Expression::Epsilon,
            WireExpr::Empty => Expression::Empty,
            WireExpr::Any => Expression::Any,
            WireExpr::Valstr => Expression::ValueStr,
            WireExpr::Valint => Expression::ValueInt,
            WireExpr::T { text } => {
                if text.is_empty() {
                    return Err("terminal text must not be empty".into());
                }
                Expression::Terminal(text)
            }
            WireExpr::N { name } => {
                if name.is_empty() {
                    return Err("nonterminal name must not be empty".into());
                }
                Expression::Nonterminal(name)
            }
            WireExpr::Sel { selector, body } => Expression::sel(selector, body),
            WireExpr::Seq { parts } => Expression::seq(parts),
            WireExpr::Choice { alternatives } => Expression::choice(alternatives),
            WireExpr::Opt { body } => Expression::opt(body),
            WireExpr::Star { body } => Expression::star(body),
            WireExpr::Plus { body } => Expression::plus(body),
            WireExpr::Sepstar { item, separator } => Expression::sepstar(item, separator),
            WireExpr::Sepplus { item, separator } => Expression::sepplus(item, separator),
        })
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = WireExpr::deserialize(d)?;
        Expression::try_from(w).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Production {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Production", 3)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireProduction {
    #[serde(default)]
    label: Option<String>,
    lhs: String,
    rhs: Expression,
}

impl<'de> Deserialize<'de> for Production {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = WireProduction::deserialize(d)?;
        if w.lhs.is_empty() {
            return Err(serde::de::Error::custom("production lhs must not be empty"));
        }
        Ok(Production { label: w.label, lhs: w.lhs, rhs: w.rhs })
    }
}

impl Serialize for Grammar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Grammar", 2)?;
        st.serialize_field("roots", &self.roots)?;
        st.serialize_field("productions", &self.productions)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGrammar {
    #[serde(default)]
    roots: Vec<String>,
    productions: Vec<Production>,
}

impl<'de> Deserialize<'de> for Grammar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = WireGrammar::deserialize(d)?;
        let g = Grammar { roots: w.roots, productions: w.productions };
        g.validate().map_err(serde::de::Error::custom)?;
        Ok(g)
    }
}
