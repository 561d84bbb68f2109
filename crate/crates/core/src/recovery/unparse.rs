use std::collections::BTreeSet;

use crate::grammar::{Expression, Grammar};
use crate::metasyntax::{NotationSpec, Role};

use super::lexer::{is_name_char, tokenize, Tok};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnparseError {
    #[error("the notation lacks {}", .0.iter().map(|r| format!("`{r}`")).collect::<Vec<_>>().join(", "))]
    MissingRoles(Vec<Role>),
    #[error("cannot write {0} in this notation")]
    Unrepresentable(String),
}

// binding strength; a child weaker than its slot gets grouped
const ALT: u8 = 0;
const CAT: u8 = 1;
const SEP: u8 = 2;
const POST: u8 = 3;
const ATOM: u8 = 4;

struct Writer<'a> {
    spec: &'a NotationSpec,
    missing: BTreeSet<Role>,
    bad: Option<String>,
}

impl Writer<'_> {
    fn lex(&mut self, role: Role) -> String {
        match self.spec.get(role) {
            Some(l) => l.to_string(),
            None => {
                self.missing.insert(role);
                String::new()
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.bad.get_or_insert(what);
    }

    /// Whether `text` on its own reads back as exactly `expected`.
    fn reads_as(&self, text: &str, expected: &Tok) -> bool {
        match tokenize(text, self.spec) {
            Ok(l) => l.warnings.is_empty() && l.tokens.len() == 1 && l.tokens[0].tok == *expected,
            Err(_) => false,
        }
    }

    fn word(&mut self, name: &str, as_value: bool, out: &mut Vec<String>) {
        let nt_mode = self.spec.has(Role::NonterminalStart);
        if !as_value && (name == "str" || name == "int") {
            return self.fail(format!("a nonterminal named `{name}`"));
        }
        let (text, expected) = if nt_mode {
            let text = format!("{}{name}{}", self.lex(Role::NonterminalStart), self.lex(Role::NonterminalEnd));
            (text, Tok::Bracketed(name.to_string()))
        } else {
            (name.to_string(), Tok::Word(name.to_string()))
        };
        if !self.reads_as(&text, &expected) {
            return self.fail(format!("the name `{name}`"));
        }
        out.push(text);
    }

    fn terminal(&mut self, t: &str, out: &mut Vec<String>) {
        if !self.spec.has(Role::TerminalStartQuote) && self.spec.has(Role::NonterminalStart) {
            if t.chars().all(is_name_char) && self.reads_as(t, &Tok::Word(t.to_string())) {
                return out.push(t.to_string());
            }
            return self.fail(format!("the terminal `{t}`"));
        }
        let text = format!("{}{t}{}", self.lex(Role::TerminalStartQuote), self.lex(Role::TerminalEndQuote));
        if !self.missing.is_empty() {
            return;
        }
        if !self.reads_as(&text, &Tok::Quoted(t.to_string())) {
            return self.fail(format!("the terminal `{t}`"));
        }
        out.push(text);
    }

    fn level(e: &Expression) -> u8 {
        use Expression::*;
        match e {
            Choice(_) => ALT,
            Sequence(_) => CAT,
            SepListStar(..) | SepListPlus(..) => SEP,
            Star(_) | Plus(_) => POST,
            Epsilon => ALT,
            _ => ATOM,
        }
    }

    fn group(&mut self, e: &Expression, out: &mut Vec<String>) {
        out.push(self.lex(Role::GroupStart));
        self.expr(e, ALT, out);
        out.push(self.lex(Role::GroupEnd));
    }

    /// Write `e` into a slot that needs at least strength `need`.
    fn expr(&mut self, e: &Expression, need: u8, out: &mut Vec<String>) {
        use Expression::*;
        let lvl = match e {
            Optional(_) if !self.spec.has(Role::OptionStart) => POST,
            _ => Self::level(e),
        };
        if lvl < need && !(matches!(e, Epsilon) && need <= CAT) {
            return self.group(e, out);
        }
        match e {
            Epsilon => {}
            Empty | Any => self.fail(format!("`{}`", if *e == Empty { "φ" } else { "α" })),
            ValueStr => self.word("str", true, out),
            ValueInt => self.word("int", true, out),
            Nonterminal(n) => self.word(n, false, out),
            Terminal(t) => self.terminal(t, out),
            Selectable(s, _) => self.fail(format!("the selector `{s}`")),
            Choice(alts) => {
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        out.push(self.lex(Role::DefinitionSeparator));
                    }
                    self.expr(a, CAT, out);
                }
            }
            Sequence(parts) => {
                let concat = self.spec.get(Role::Concatenation).map(str::to_string);
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        if let Some(c) = &concat {
                            out.push(c.clone());
                        }
                    }
                    if matches!(p, Epsilon) {
                        self.group(p, out);
                    } else {
                        self.expr(p, SEP, out);
                    }
                }
            }
            SepListStar(item, sep) | SepListPlus(item, sep) => {
                self.expr(item, SEP, out);
                out.push(self.lex(if matches!(e, SepListStar(..)) { Role::SeplistStar } else { Role::SeplistPlus }));
                self.expr(sep, POST, out);
            }
            Star(b) | Plus(b) => {
                self.expr(b, POST, out);
                out.push(self.lex(if matches!(e, Star(_)) { Role::StarPostfix } else { Role::PlusPostfix }));
            }
            Optional(b) => {
                if self.spec.has(Role::OptionStart) {
                    out.push(self.lex(Role::OptionStart));
                    self.expr(b, ALT, out);
                    out.push(self.lex(Role::OptionEnd));
                } else if self.spec.has(Role::OptionPostfix) {
                    self.expr(b, POST, out);
                    out.push(self.lex(Role::OptionPostfix));
                } else {
                    self.missing.insert(Role::OptionStart);
                    self.missing.insert(Role::OptionEnd);
                }
            }
        }
    }
}

/// Write `g` as text in the notation of `spec`, one production per line.
pub fn unparse(g: &Grammar, spec: &NotationSpec) -> Result<String, UnparseError> {
    let mut w = Writer { spec, missing: BTreeSet::new(), bad: None };
    let mut text = String::new();
    for p in &g.productions {
        if let Some(l) = &p.label {
            w.fail(format!("the label `{l}`"));
        }
        let mut toks = Vec::new();
        w.word(&p.lhs, false, &mut toks);
        toks.push(w.lex(Role::Defining));
        w.expr(&p.rhs, ALT, &mut toks);
        if let Some(t) = spec.get(Role::Terminator) {
            toks.push(t.to_string());
        }
        text.push_str(&toks.join(" "));
        text.push('\n');
    }
    if !w.missing.is_empty() {
        return Err(UnparseError::MissingRoles(w.missing.into_iter().collect()));
    }
    if let Some(what) = w.bad {
        return Err(UnparseError::Unrepresentable(what));
    }
    Ok(text)
}
