//! Character cursor shared by the schema and output grammars.
//!
//! Both grammars use the same whitespace (with `#` line comments), the same
//! identifier shape and the same double-quoted string literal.

use std::fmt;

/// 1-based line/column plus the byte offset into the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub position: Position,
    pub expected: String,
}

pub(crate) type LexResult<T> = Result<T, LexError>;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    offset: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self {
            src,
            offset: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn position(&self) -> Position {
        Position {
            line: self.line,
            col: self.col,
            offset: self.offset,
        }
    }

    pub fn at_end(&self) -> bool {
        self.offset >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn error<T>(&self, expected: impl Into<String>) -> LexResult<T> {
        Err(LexError {
            position: self.position(),
            expected: expected.into(),
        })
    }

    /// Skips whitespace and `#` comments running to end of line.
    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> LexResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(format!("'{c}'"))
        }
    }

    /// Matches a keyword as a whole identifier, so `events` does not match `event`.
    pub fn keyword(&mut self, word: &str) -> LexResult<()> {
        let start = self.position();
        match self.ident() {
            Ok(got) if got == word => Ok(()),
            _ => Err(LexError {
                position: start,
                expected: format!("keyword `{word}`"),
            }),
        }
    }

    pub fn ident(&mut self) -> LexResult<String> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return self.error("identifier"),
        }
        let start = self.offset;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.offset].to_string())
    }

    pub fn string(&mut self) -> LexResult<String> {
        if !self.eat('"') {
            return self.error("string literal");
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.error("closing '\"'"),
                Some('"') => return Ok(out),
                Some('\\') => match self.peek() {
                    Some(c @ ('"' | '\\')) => {
                        self.bump();
                        out.push(c);
                    }
                    _ => return self.error("escape `\\\"` or `\\\\`"),
                },
                Some(c) => out.push(c),
            }
        }
    }
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Renders `s` as a string literal accepted by [`Cursor::string`].
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}
