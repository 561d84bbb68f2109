//! EBNF dialect definitions (EDD).
//!
//! A [`NotationSpec`] assigns lexemes to metasymbol roles. It is read from a
//! flat `role: lexeme` document:
//!
//! ```text
//! # FL as printed in the examples
//! defining: ::=
//! terminator: ;
//! definition-separator: |
//! plus-postfix: +
//! ```
//!
//! Lexemes may be wrapped in double quotes, which is the only way to write a
//! lexeme that starts with `#` or has surrounding spaces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mutate::Mutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Defining,
    Terminator,
    DefinitionSeparator,
    Concatenation,
    GroupStart,
    GroupEnd,
    OptionStart,
    OptionEnd,
    StarPostfix,
    PlusPostfix,
    OptionPostfix,
    TerminalStartQuote,
    TerminalEndQuote,
    NonterminalStart,
    NonterminalEnd,
    SeplistStar,
    SeplistPlus,
    LineCommentStart,
}

impl Role {
    pub const ALL: [Role; 18] = [
        Role::Defining,
        Role::Terminator,
        Role::DefinitionSeparator,
        Role::Concatenation,
        Role::GroupStart,
        Role::GroupEnd,
        Role::OptionStart,
        Role::OptionEnd,
        Role::StarPostfix,
        Role::PlusPostfix,
        Role::OptionPostfix,
        Role::TerminalStartQuote,
        Role::TerminalEndQuote,
        Role::NonterminalStart,
        Role::NonterminalEnd,
        Role::SeplistStar,
        Role::SeplistPlus,
        Role::LineCommentStart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Defining => "defining",
            Role::Terminator => "terminator",
            Role::DefinitionSeparator => "definition-separator",
            Role::Concatenation => "concatenation",
            Role::GroupStart => "group-start",
            Role::GroupEnd => "group-end",
            Role::OptionStart => "option-start",
            Role::OptionEnd => "option-end",
            Role::StarPostfix => "star-postfix",
            Role::PlusPostfix => "plus-postfix",
            Role::OptionPostfix => "option-postfix",
            Role::TerminalStartQuote => "terminal-start-quote",
            Role::TerminalEndQuote => "terminal-end-quote",
            Role::NonterminalStart => "nonterminal-start",
            Role::NonterminalEnd => "nonterminal-end",
            Role::SeplistStar => "seplist-star",
            Role::SeplistPlus => "seplist-plus",
            Role::LineCommentStart => "line-comment-start",
        }
    }

    /// The other half of a bracket pair.
    pub fn partner(self) -> Option<Role> {
        Some(match self {
            Role::GroupStart => Role::GroupEnd,
            Role::GroupEnd => Role::GroupStart,
            Role::OptionStart => Role::OptionEnd,
            Role::OptionEnd => Role::OptionStart,
            Role::TerminalStartQuote => Role::TerminalEndQuote,
            Role::TerminalEndQuote => Role::TerminalStartQuote,
            Role::NonterminalStart => Role::NonterminalEnd,
            Role::NonterminalEnd => Role::NonterminalStart,
            _ => return None,
        })
    }

    // quotes and angle brackets can open and close with the same text
    fn may_share_with(self, other: Role) -> bool {
        self.partner() == Some(other)
            && matches!(self, Role::TerminalStartQuote | Role::TerminalEndQuote | Role::NonterminalStart | Role::NonterminalEnd)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Role, String> {
        Role::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| format!("unknown metasymbol role `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetasyntaxError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown metasymbol role `{name}`")]
    UnknownRole { line: usize, name: String },
    #[error("line {line}: role `{role}` is given twice")]
    DuplicateRole { line: usize, role: Role },
    #[error("roles `{a}` and `{b}` share the lexeme `{lexeme}`")]
    Conflict { a: Role, b: Role, lexeme: String },
    #[error("the `defining` role is missing")]
    MissingDefining,
    #[error("`{role}` is given without `{partner}`")]
    Unpaired { role: Role, partner: Role },
    #[error("role `{0}` is not present")]
    Absent(Role),
    #[error("role `{0}` is already present")]
    Present(Role),
    #[error("role `{role}` is `{found}`, not `{expected}`")]
    Mismatch { role: Role, expected: String, found: String },
    #[error("a lexeme may not be empty")]
    EmptyLexeme,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NotationSpec {
    lexemes: BTreeMap<Role, String>,
}

impl NotationSpec {
    /// Build from role/lexeme pairs, checking every invariant.
    pub fn new<I, S>(pairs: I) -> Result<NotationSpec, MetasyntaxError>
    where
        I: IntoIterator<Item = (Role, S)>,
        S: Into<String>,
    {
        let spec = NotationSpec { lexemes: pairs.into_iter().map(|(r, s)| (r, s.into())).collect() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn get(&self, role: Role) -> Option<&str> {
        self.lexemes.get(&role).map(String::as_str)
    }

    pub fn has(&self, role: Role) -> bool {
        self.lexemes.contains_key(&role)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Role, &str)> {
        self.lexemes.iter().map(|(r, s)| (*r, s.as_str()))
    }

    pub fn validate(&self) -> Result<(), MetasyntaxError> {
        self.check_conflicts()?;
        if !self.has(Role::Defining) {
            return Err(MetasyntaxError::MissingDefining);
        }
        for role in self.lexemes.keys() {
            if let Some(partner) = role.partner() {
                if !self.has(partner) {
                    return Err(MetasyntaxError::Unpaired { role: *role, partner });
                }
            }
        }
        Ok(())
    }

    fn check_conflicts(&self) -> Result<(), MetasyntaxError> {
        let entries: Vec<_> = self.lexemes.iter().collect();
        for (i, (a, la)) in entries.iter().enumerate() {
            if la.is_empty() {
                return Err(MetasyntaxError::EmptyLexeme);
            }
            for (b, lb) in &entries[i + 1..] {
                if la == lb && !a.may_share_with(**b) {
                    return Err(MetasyntaxError::Conflict { a: **a, b: **b, lexeme: la.to_string() });
                }
            }
        }
        Ok(())
    }

    /// Render as an `.edd` document that [`parse_spec`] reads back.
    pub fn to_edd(&self) -> String {
        let mut out = String::new();
        for (role, lex) in &self.lexemes {
            let needs_quotes = lex.starts_with('#') || lex.trim() != lex || lex.starts_with('"');
            if needs_quotes {
                out.push_str(&format!("{role}: \"{lex}\"\n"));
            } else {
                out.push_str(&format!("{role}: {lex}\n"));
            }
        }
        out
    }
}

impl FromStr for NotationSpec {
    type Err = MetasyntaxError;

    fn from_str(s: &str) -> Result<Self, MetasyntaxError> {
        parse_spec(s)
    }
}

pub fn parse_spec(doc: &str) -> Result<NotationSpec, MetasyntaxError> {
    let mut lexemes = BTreeMap::new();
    for (i, raw) in doc.lines().enumerate() {
        let line = i + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let (key, value) = text
            .split_once(':')
            .ok_or_else(|| MetasyntaxError::Syntax { line, message: format!("expected `role: lexeme`, found `{text}`") })?;
        let key = key.trim();
        let role: Role = key.parse().map_err(|_| MetasyntaxError::UnknownRole { line, name: key.to_string() })?;
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        if value.is_empty() {
            return Err(MetasyntaxError::Syntax { line, message: format!("empty lexeme for `{role}`") });
        }
        if lexemes.insert(role, value.to_string()).is_some() {
            return Err(MetasyntaxError::DuplicateRole { line, role });
        }
    }
    let spec = NotationSpec { lexemes };
    spec.validate()?;
    Ok(spec)
}

pub fn rename_metasymbol(spec: &NotationSpec, role: Role, v1: &str, v2: &str) -> Result<NotationSpec, MetasyntaxError> {
    let current = spec.get(role).ok_or(MetasyntaxError::Absent(role))?;
    if current != v1 {
        return Err(MetasyntaxError::Mismatch { role, expected: v1.to_string(), found: current.to_string() });
    }
    let mut out = spec.clone();
    out.lexemes.insert(role, v2.to_string());
    out.check_conflicts()?;
    Ok(out)
}

pub fn introduce_metasymbol(spec: &NotationSpec, role: Role, v: &str) -> Result<NotationSpec, MetasyntaxError> {
    if spec.has(role) {
        return Err(MetasyntaxError::Present(role));
    }
    let mut out = spec.clone();
    out.lexemes.insert(role, v.to_string());
    out.check_conflicts()?;
    Ok(out)
}

pub fn eliminate_metasymbol(spec: &NotationSpec, role: Role, v: &str) -> Result<NotationSpec, MetasyntaxError> {
    let current = spec.get(role).ok_or(MetasyntaxError::Absent(role))?;
    if current != v {
        return Err(MetasyntaxError::Mismatch { role, expected: v.to_string(), found: current.to_string() });
    }
    let mut out = spec.clone();
    out.lexemes.remove(&role);
    Ok(out)
}

/// One application of a metasymbol operator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum RoleChange {
    Rename { role: Role, from: String, to: String },
    Introduce { role: Role, lexeme: String },
    Eliminate { role: Role, lexeme: String },
}

impl RoleChange {
    pub fn apply(&self, spec: &NotationSpec) -> Result<NotationSpec, MetasyntaxError> {
        match self {
            RoleChange::Rename { role, from, to } => rename_metasymbol(spec, *role, from, to),
            RoleChange::Introduce { role, lexeme } => introduce_metasymbol(spec, *role, lexeme),
            RoleChange::Eliminate { role, lexeme } => eliminate_metasymbol(spec, *role, lexeme),
        }
    }
}

/// The grammar mutation that migrates grammars across `change`, or `None`
/// when grammars need no change.
pub fn coupled_mutation(change: &RoleChange) -> Option<Mutation> {
    match change {
        RoleChange::Eliminate { role: Role::GroupStart | Role::GroupEnd, .. } => Some(Mutation::FoldGroups),
        RoleChange::Eliminate { role: Role::SeplistStar | Role::SeplistPlus, .. } => Some(Mutation::EncodeSeplists),
        _ => None,
    }
}
