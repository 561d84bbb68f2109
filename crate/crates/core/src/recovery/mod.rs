//! Notation-parametric grammar recovery.
//!
//! [`recover`] reads grammar text written in the dialect described by a
//! [`NotationSpec`]; [`unparse`] writes a grammar back in that dialect.
//!
//! Right-hand sides are parsed with postfix operators binding tighter than
//! separator lists, separator lists tighter than concatenation, and
//! concatenation tighter than the definition separator. Separator lists are
//! written infix, `item ++ separator`.

mod lexer;
mod unparse;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::grammar::{Expression, Grammar, Production};
use crate::metasyntax::{NotationSpec, Role};

use lexer::{tokenize, Tok, Token};

pub use unparse::{unparse, UnparseError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeuristicEvent {
    pub heuristic: &'static str,
    pub line: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub grammar: Grammar,
    pub warnings: Vec<Warning>,
    pub heuristics: Vec<HeuristicEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecoveryError {
    #[error("line {line}: unbalanced `{role}`")]
    Unbalanced { line: usize, role: Role },
    #[error("line {line}: unterminated `{role}`")]
    Unterminated { line: usize, role: Role },
    #[error("line {line}: defining symbol without a left-hand side")]
    DanglingDefining { line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl RecoveryError {
    pub fn line(&self) -> usize {
        match self {
            RecoveryError::Unbalanced { line, .. }
            | RecoveryError::Unterminated { line, .. }
            | RecoveryError::DanglingDefining { line }
            | RecoveryError::Syntax { line, .. } => *line,
        }
    }
}

pub fn recover(text: &str, spec: &NotationSpec) -> Result<RecoveryReport, RecoveryError> {
    let lexed = tokenize(text, spec)?;
    let mut warnings: Vec<Warning> =
        lexed.warnings.into_iter().map(|(line, message)| Warning { line, message }).collect();
    let mut heuristics = Vec::new();
    let toks = lexed.tokens;
    let starts_at = |i: usize| {
        matches!(toks[i].tok, Tok::Word(_) | Tok::Bracketed(_))
            && matches!(toks.get(i + 1), Some(Token { tok: Tok::Meta(Role::Defining), .. }))
    };
    let has_terminator = spec.has(Role::Terminator);

    let mut productions: Vec<Production> = Vec::new();
    let mut defined_at: Vec<(String, usize)> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if !starts_at(i) {
            let t = &toks[i];
            match t.tok {
                Tok::Meta(Role::Defining) => return Err(RecoveryError::DanglingDefining { line: t.line }),
                Tok::Meta(Role::Terminator) => {
                    warnings.push(Warning { line: t.line, message: "stray terminator skipped".into() });
                    heuristics.push(HeuristicEvent {
                        heuristic: "stray-terminator",
                        line: t.line,
                        detail: "skipped".into(),
                    });
                }
                _ => warnings.push(Warning { line: t.line, message: format!("stray {} outside a production", describe(&t.tok, spec)) }),
            }
            i += 1;
            continue;
        }
        let line = toks[i].line;
        let lhs = match &toks[i].tok {
            Tok::Word(w) | Tok::Bracketed(w) => w.clone(),
            _ => unreachable!(),
        };
        let body_start = i + 2;
        let mut j = body_start;
        let mut terminated = false;
        while j < toks.len() {
            if has_terminator && toks[j].tok == Tok::Meta(Role::Terminator) {
                terminated = true;
                break;
            }
            if starts_at(j) {
                break;
            }
            j += 1;
        }
        if has_terminator && !terminated {
            warnings.push(Warning { line, message: format!("production of `{lhs}` lacks a terminator") });
        }
        let end_line = toks.get(j).or(toks.last()).map_or(line, |t| t.line);
        let rhs = Parser { toks: &toks[body_start..j], pos: 0, spec, end_line }.parse_body()?;
        if defined_at.iter().any(|(n, _)| *n == lhs) {
            heuristics.push(HeuristicEvent {
                heuristic: "redefinition",
                line,
                detail: format!("`{lhs}` gains another rule"),
            });
        }
        defined_at.push((lhs.clone(), line));
        productions.push(Production::new(lhs, rhs));
        i = if terminated { j + 1 } else { j };
    }

    let defined: BTreeSet<&String> = defined_at.iter().map(|(n, _)| n).collect();
    let mut reported = BTreeSet::new();
    for p in &productions {
        for n in p.rhs.nonterminals() {
            if !defined.contains(&n) && reported.insert(n.clone()) {
                let line = defined_at.iter().find(|(m, _)| *m == p.lhs).map_or(0, |(_, l)| *l);
                warnings.push(Warning { line, message: format!("`{n}` is used but not defined") });
                heuristics.push(HeuristicEvent { heuristic: "undefined-name", line, detail: n });
            }
        }
    }
    if productions.is_empty() {
        warnings.push(Warning { line: 1, message: "no productions found".into() });
    }
    warnings.sort_by_key(|w| w.line);
    let roots = productions.first().map(|p| vec![p.lhs.clone()]).unwrap_or_default();
    Ok(RecoveryReport { grammar: Grammar::new(roots, productions), warnings, heuristics })
}

fn describe(t: &Tok, spec: &NotationSpec) -> String {
    match t {
        Tok::Meta(r) => format!("`{}`", spec.get(*r).unwrap_or_default()),
        Tok::Word(w) => format!("word `{w}`"),
        Tok::Bracketed(w) => format!("nonterminal `{w}`"),
        Tok::Quoted(w) => format!("terminal `{w}`"),
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    spec: &'a NotationSpec,
    end_line: usize,
}

fn is_reserved(w: &str) -> Option<Expression> {
    match w {
        "str" => Some(Expression::ValueStr),
        "int" => Some(Expression::ValueInt),
        _ => None,
    }
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_line, |t| t.line)
    }

    fn parse_body(mut self) -> Result<Expression, RecoveryError> {
        let e = self.alt()?;
        match self.peek() {
            None => Ok(e),
            Some(Tok::Meta(r @ (Role::GroupEnd | Role::OptionEnd))) => {
                Err(RecoveryError::Unbalanced { line: self.line(), role: *r })
            }
            Some(t) => Err(RecoveryError::Syntax {
                line: self.line(),
                message: format!("unexpected {}", describe(t, self.spec)),
            }),
        }
    }

    fn alt(&mut self) -> Result<Expression, RecoveryError> {
        let mut alts = vec![self.cat()?];
        while self.peek() == Some(&Tok::Meta(Role::DefinitionSeparator)) {
            self.pos += 1;
            alts.push(self.cat()?);
        }
        Ok(Expression::choice(alts))
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Word(_) | Tok::Bracketed(_) | Tok::Quoted(_) | Tok::Meta(Role::GroupStart | Role::OptionStart))
        )
    }

    fn cat(&mut self) -> Result<Expression, RecoveryError> {
        let mut parts = Vec::new();
        loop {
            if self.peek() == Some(&Tok::Meta(Role::Concatenation)) {
                if parts.is_empty() {
                    return Err(RecoveryError::Syntax { line: self.line(), message: "concatenation without a left operand".into() });
                }
                self.pos += 1;
                if !self.starts_atom() {
                    return Err(RecoveryError::Syntax { line: self.line(), message: "concatenation without a right operand".into() });
                }
            }
            if !self.starts_atom() {
                break;
            }
            parts.push(self.sepl()?);
        }
        Ok(Expression::seq(parts))
    }

    fn sepl(&mut self) -> Result<Expression, RecoveryError> {
        let mut e = self.post()?;
        while let Some(Tok::Meta(op @ (Role::SeplistStar | Role::SeplistPlus))) = self.peek() {
            let op = *op;
            self.pos += 1;
            if !self.starts_atom() {
                return Err(RecoveryError::Syntax { line: self.line(), message: "separator list without a separator".into() });
            }
            let sep = self.post()?;
            e = if op == Role::SeplistStar { Expression::sepstar(e, sep) } else { Expression::sepplus(e, sep) };
        }
        Ok(e)
    }

    fn post(&mut self) -> Result<Expression, RecoveryError> {
        let mut e = self.atom()?;
        loop {
            e = match self.peek() {
                Some(Tok::Meta(Role::StarPostfix)) => Expression::star(e),
                Some(Tok::Meta(Role::PlusPostfix)) => Expression::plus(e),
                Some(Tok::Meta(Role::OptionPostfix)) => Expression::opt(e),
                _ => return Ok(e),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Expression, RecoveryError> {
        let line = self.line();
        let nt_mode = self.spec.has(Role::NonterminalStart);
        let t = self.peek().cloned();
        self.pos += 1;
        match t {
            Some(Tok::Word(w)) if nt_mode => Ok(Expression::Terminal(w)),
            Some(Tok::Word(w) | Tok::Bracketed(w)) => Ok(is_reserved(&w).unwrap_or(Expression::Nonterminal(w))),
            Some(Tok::Quoted(q)) => Ok(Expression::Terminal(q)),
            Some(Tok::Meta(open @ (Role::GroupStart | Role::OptionStart))) => {
                let inner = self.alt()?;
                let close = open.partner().unwrap();
                if self.peek() != Some(&Tok::Meta(close)) {
                    return Err(RecoveryError::Unbalanced { line, role: open });
                }
                self.pos += 1;
                Ok(if open == Role::OptionStart { Expression::opt(inner) } else { inner })
            }
            _ => unreachable!("callers check starts_atom"),
        }
    }
}
