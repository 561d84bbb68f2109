use crate::metasyntax::{NotationSpec, Role};

use super::RecoveryError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Meta(Role),
    /// A bare run of name characters.
    Word(String),
    /// Text between nonterminal brackets.
    Bracketed(String),
    Quoted(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
}

pub(crate) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

#[derive(Debug)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    pub warnings: Vec<(usize, String)>,
}

/// Longest lexeme starting at the beginning of `s`. Of two roles sharing a
/// lexeme the opening one is reported.
fn match_lexeme(spec: &NotationSpec, s: &str) -> Option<(Role, usize)> {
    let mut best: Option<(Role, usize)> = None;
    for (role, lex) in spec.iter() {
        if role == Role::TerminalEndQuote || role == Role::NonterminalEnd {
            if let Some(partner) = role.partner() {
                if spec.get(partner) == Some(lex) {
                    continue;
                }
            }
        }
        if s.starts_with(lex) && best.is_none_or(|(_, n)| lex.len() > n) {
            best = Some((role, lex.len()));
        }
    }
    best
}

pub(crate) fn tokenize(text: &str, spec: &NotationSpec) -> Result<Lexed, RecoveryError> {
    let mut tokens = Vec::new();
    let mut warnings = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let name_len: usize = rest.chars().take_while(|c| is_name_char(*c)).map(char::len_utf8).sum();
        match match_lexeme(spec, rest) {
            Some((role, n)) if n >= name_len => {
                i += n;
                match role {
                    Role::LineCommentStart => {
                        i += text[i..].find('\n').unwrap_or(text.len() - i);
                    }
                    Role::TerminalStartQuote | Role::NonterminalStart => {
                        let end = spec.get(role.partner().unwrap()).unwrap();
                        let body = &text[i..];
                        let stop = body.find(end).filter(|k| !body[..*k].contains('\n'));
                        let Some(k) = stop else {
                            return Err(RecoveryError::Unterminated { line, role });
                        };
                        let inner = &body[..k];
                        i += k + end.len();
                        if role == Role::TerminalStartQuote {
                            if inner.is_empty() {
                                warnings.push((line, "empty terminal ignored".to_string()));
                            } else {
                                tokens.push(Token { tok: Tok::Quoted(inner.to_string()), line });
                            }
                        } else {
                            let name = inner.trim();
                            if name.is_empty() {
                                return Err(RecoveryError::Syntax { line, message: "empty nonterminal name".into() });
                            }
                            tokens.push(Token { tok: Tok::Bracketed(name.to_string()), line });
                        }
                    }
                    _ => tokens.push(Token { tok: Tok::Meta(role), line }),
                }
            }
            _ if name_len > 0 => {
                tokens.push(Token { tok: Tok::Word(rest[..name_len].to_string()), line });
                i += name_len;
            }
            _ => {
                warnings.push((line, format!("unknown character `{c}` skipped")));
                i += c.len_utf8();
            }
        }
    }
    Ok(Lexed { tokens, warnings })
}
