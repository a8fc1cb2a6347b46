//! Shared tokenizer for the text formats (formulas, sequents, proofs, trees,
//! line graphs and the one-sided calculus).

use std::fmt;

use thiserror::Error;

/// A 1-based line/column position in the input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lolli,
    Plus,
    Amp,
    Star,
    At,
    Tilde,
    Comma,
    Turnstile,
    Question,
    Colon,
    Arrow,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Lolli => "-o",
            Tok::Plus => "+",
            Tok::Amp => "&",
            Tok::Star => "*",
            Tok::At => "@",
            Tok::Tilde => "~",
            Tok::Comma => ",",
            Tok::Turnstile => "|-",
            Tok::Question => "?",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::Ident(name) => return write!(f, "`{name}`"),
        };
        write!(f, "`{s}`")
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens with their starting positions.
pub fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    while let Some(&c) = chars.peek() {
        let start = pos;
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                pos.line += 1;
                pos.col = 1;
            } else {
                pos.col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            // Comment to end of line.
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '+' => Some(Tok::Plus),
            '&' => Some(Tok::Amp),
            '*' => Some(Tok::Star),
            '@' => Some(Tok::At),
            '~' => Some(Tok::Tilde),
            ',' => Some(Tok::Comma),
            '?' => Some(Tok::Question),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            bump(&mut chars);
            out.push((tok, start));
            continue;
        }
        match c {
            '-' => {
                bump(&mut chars);
                match bump(&mut chars) {
                    Some('o') => out.push((Tok::Lolli, start)),
                    Some('>') => out.push((Tok::Arrow, start)),
                    _ => return Err(ParseError::new(start, "expected `-o` or `->`")),
                }
            }
            '|' => {
                bump(&mut chars);
                match bump(&mut chars) {
                    Some('-') => out.push((Tok::Turnstile, start)),
                    _ => return Err(ParseError::new(start, "expected `|-`")),
                }
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_char(c) {
                        break;
                    }
                    name.push(c);
                    bump(&mut chars);
                }
                out.push((Tok::Ident(name), start));
            }
            other => {
                return Err(ParseError::new(
                    start,
                    format!("unexpected character `{other}`"),
                ))
            }
        }
    }
    Ok(out)
}

/// Cursor over a token stream with one-token lookahead.
pub struct Tokens {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Tokens {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        let end = end_pos(text);
        Ok(Tokens { toks, at: 0, end })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    pub fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(t, _)| t)
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    pub fn is_done(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn expect(&mut self, want: Tok) -> Result<Pos, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((t, p)) if t == want => Ok(p),
            Some((t, p)) => Err(ParseError::new(p, format!("expected {want}, found {t}"))),
            None => Err(ParseError::new(
                pos,
                format!("expected {want}, found end of input"),
            )),
        }
    }

    pub fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Ident(name), p)) => Ok((name, p)),
            Some((t, p)) => Err(ParseError::new(p, format!("expected {what}, found {t}"))),
            None => Err(ParseError::new(
                pos,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some((t, p)) => Err(ParseError::new(*p, format!("unexpected trailing {t}"))),
        }
    }
}

fn end_pos(text: &str) -> Pos {
    let mut pos = Pos { line: 1, col: 1 };
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    }
    pos
}

/// `[a-z][a-zA-Z0-9_]*`
pub fn is_atom_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(is_ident_char)
}

/// `[a-zA-Z0-9_]+`
pub fn is_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_operators_and_positions() {
        let toks = tokenize("(a -o\n b) |- c").unwrap();
        assert_eq!(toks[2], (Tok::Lolli, Pos { line: 1, col: 4 }));
        assert_eq!(toks[3], (Tok::Ident("b".into()), Pos { line: 2, col: 2 }));
        assert_eq!(toks[5].0, Tok::Turnstile);
    }

    #[test]
    fn skips_comments() {
        let toks = tokenize("# header\na # trailing\nb").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].1, Pos { line: 3, col: 1 });
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("(a $ b)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 4 });
        assert!(tokenize("a - b").is_err());
    }

    #[test]
    fn name_classes() {
        assert!(is_atom_name("a1_B"));
        assert!(!is_atom_name("A"));
        assert!(!is_atom_name("1a"));
        assert!(is_label("0"));
        assert!(is_label("X_1"));
        assert!(!is_label(""));
    }
}
