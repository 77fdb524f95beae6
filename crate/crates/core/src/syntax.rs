//! Tokenizer and cursor shared by the net, sync, and property file parsers.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Positioned syntax error with the set of tokens that would have been
/// accepted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

const SYMBOLS: [&str; 14] = [
    "->", "{", "}", ";", ":", ",", ".", "(", ")", "[", "]", "!", "&", "|",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while matches!(chars.peek(), Some(&(_, c)) if c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    end = j + c.len_utf8();
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token {
                tok: Tok::Ident(text[i..end].to_string()),
                pos,
            });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            for _ in 0..sym.len() {
                chars.next();
            }
            col += sym.len();
            tokens.push(Token {
                tok: Tok::Sym(sym),
                pos,
            });
        } else {
            return Err(SyntaxError {
                pos,
                expected: vec!["a token".into()],
                found: format!("character `{c}`"),
            });
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(tokens)
}

pub struct Cursor {
    tokens: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Self {
            tokens: tokenize(text)?,
            at: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    pub fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.at + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    pub fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    pub fn error<S: Into<String>>(&self, expected: impl IntoIterator<Item = S>) -> SyntaxError {
        SyntaxError {
            pos: self.pos(),
            expected: expected.into_iter().map(Into::into).collect(),
            found: self.peek().to_string(),
        }
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    pub fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<Pos, SyntaxError> {
        if self.at_sym(s) {
            Ok(self.bump().pos)
        } else {
            Err(self.error([format!("`{s}`")]))
        }
    }

    pub fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> Result<Pos, SyntaxError> {
        if self.at_keyword(k) {
            Ok(self.bump().pos)
        } else {
            Err(self.error([format!("`{k}`")]))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().pos))
            }
            _ => Err(self.error(["identifier"])),
        }
    }

    pub fn expect_eof(&self) -> Result<(), SyntaxError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(["end of input"]))
        }
    }
}
