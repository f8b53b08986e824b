use alloc::string::String;
use alloc::vec::Vec;

use super::SyntaxError;
use crate::engine::{Direction, Mode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Var(String),
    Type(String),
    LInfon,
    RInfon,
    Lt,
    Gt,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Eq,
    Caret,
    Pipe,
    Supp(Mode),
    Arrow(Direction),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Name(n) => alloc::format!("`{n}`"),
            Tok::Var(v) => alloc::format!("`?{v}`"),
            Tok::Type(t) => alloc::format!("`~{t}`"),
            Tok::LInfon => "`<<`".into(),
            Tok::RInfon => "`>>`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Supp(m) => alloc::format!("`{m}`"),
            Tok::Arrow(d) => alloc::format!("`{d}`"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    /// Byte offset into the statement text.
    pub at: usize,
}

const OPERATORS: &[char] = &['⊨', '⊭', '≠', '≪', '≫', '⟨', '⟩', '←', '→', '↔', '⇐', '⇒', '⇔'];

pub(crate) fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !",<>{}[]|=:;^?~\"".contains(c) && !OPERATORS.contains(&c)
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let peek = |i: usize| chars.get(i).map(|&(_, c)| c);
    while i < chars.len() {
        let (at, c) = chars[i];
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, at });
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == ';' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let word = |start: usize| {
            let mut j = start;
            while j < chars.len() && is_name_char(chars[j].1) {
                j += 1;
            }
            let s: String = chars[start..j].iter().map(|&(_, c)| c).collect();
            (s, j)
        };
        match c {
            '<' | '⟨' => match peek(i + 1) {
                Some('<' | '⟨') => {
                    push(&mut out, Tok::LInfon);
                    i += 2;
                }
                Some('=') if c == '<' => {
                    if peek(i + 2) == Some('>') {
                        push(&mut out, Tok::Arrow(Direction::Both));
                        i += 3;
                    } else {
                        push(&mut out, Tok::Arrow(Direction::Backward));
                        i += 2;
                    }
                }
                _ => {
                    push(&mut out, Tok::Lt);
                    i += 1;
                }
            },
            '>' | '⟩' => {
                if matches!(peek(i + 1), Some('>' | '⟩')) {
                    push(&mut out, Tok::RInfon);
                    i += 2;
                } else {
                    push(&mut out, Tok::Gt);
                    i += 1;
                }
            }
            '≪' => {
                push(&mut out, Tok::LInfon);
                i += 1;
            }
            '≫' => {
                push(&mut out, Tok::RInfon);
                i += 1;
            }
            '=' => {
                if peek(i + 1) == Some('>') {
                    push(&mut out, Tok::Arrow(Direction::Forward));
                    i += 2;
                } else {
                    push(&mut out, Tok::Eq);
                    i += 1;
                }
            }
            '|' => match (peek(i + 1), peek(i + 2)) {
                (Some('='), _) => {
                    push(&mut out, Tok::Supp(Mode::Supports));
                    i += 2;
                }
                (Some('/'), Some('=')) => {
                    push(&mut out, Tok::Supp(Mode::NotSupports));
                    i += 3;
                }
                (Some('≠'), _) => {
                    push(&mut out, Tok::Supp(Mode::NotSupports));
                    i += 2;
                }
                _ => {
                    push(&mut out, Tok::Pipe);
                    i += 1;
                }
            },
            '⊨' | '⊭' => {
                push(&mut out, Tok::Supp(if c == '⊨' { Mode::Supports } else { Mode::NotSupports }));
                i += 1;
            }
            '←' | '⇐' | '→' | '⇒' | '↔' | '⇔' => {
                let d = match c {
                    '←' | '⇐' => Direction::Backward,
                    '→' | '⇒' => Direction::Forward,
                    _ => Direction::Both,
                };
                push(&mut out, Tok::Arrow(d));
                i += 1;
            }
            '{' | '}' | '[' | ']' | ',' | ':' | '^' => {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    _ => Tok::Caret,
                };
                push(&mut out, t);
                i += 1;
            }
            '?' | '~' => {
                let (s, j) = word(i + 1);
                if s.is_empty() {
                    return Err(SyntaxError::at(text, at, alloc::format!("`{c}` must be followed by a name"), None));
                }
                push(&mut out, if c == '?' { Tok::Var(s) } else { Tok::Type(s) });
                i = j;
            }
            _ if is_name_char(c) => {
                let (s, j) = word(i);
                push(&mut out, Tok::Name(s));
                i = j;
            }
            _ => return Err(SyntaxError::at(text, at, alloc::format!("unexpected character `{c}`"), None)),
        }
    }
    Ok(out)
}
