//! Tokeniser shared by model and assertion files.
//!
//! Dotted names such as `EXAX.move.in.0.-1` are single tokens when written
//! without spaces; everything else is split on the usual boundaries.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifier or dotted path.
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    /// First token on its line.
    pub line_start: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub start: usize,
    pub end: usize,
}

const SYMBOLS: [&str; 35] = [
    "|||", "|~|", "[|", "|]", "|>", "{|", "|}", "|\\", "[]", "->", ":=", "==", "!=", "<=", ">=", "..", ";", ":", ",",
    "(", ")", "{", "}", "[", "]", "!", "?", "=", "<", ">", "+", "-", "*", "\\", ".",
];

fn ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

/// Splits `src` into tokens. Lexical errors are collected and the offending
/// character skipped.
pub fn lex(src: &str) -> (Vec<Token>, Vec<LexError>) {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < b.len() {
        let c = b[i];
        if c == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b[i..].starts_with(b"//") {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if ident_start(c) {
            while i < b.len() && ident_char(b[i]) {
                i += 1;
            }
            // Path continuation: `.ident`, `.123` or `.-123` with no spaces.
            while i + 1 < b.len() && b[i] == b'.' {
                let n = b[i + 1];
                if ident_start(n) || n.is_ascii_digit() {
                    i += 1;
                    while i < b.len() && ident_char(b[i]) {
                        i += 1;
                    }
                } else if n == b'-' && i + 2 < b.len() && b[i + 2].is_ascii_digit() {
                    i += 2;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    break;
                }
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            match src[start..i].parse::<i64>() {
                Ok(v) => Tok::Int(v),
                Err(_) => {
                    errors.push(LexError {
                        message: "integer literal is too large".into(),
                        start,
                        end: i,
                    });
                    Tok::Int(0)
                }
            }
        } else if let Some(s) = SYMBOLS.iter().find(|s| b[i..].starts_with(s.as_bytes())) {
            i += s.len();
            Tok::Sym(s)
        } else {
            let ch = src[i..].chars().next().unwrap();
            i += ch.len_utf8();
            errors.push(LexError {
                message: format!("unexpected character `{ch}`"),
                start,
                end: i,
            });
            continue;
        };
        out.push(Token {
            tok,
            start,
            end: i,
            line_start,
        });
        line_start = false;
    }
    out.push(Token {
        tok: Tok::Eof,
        start: src.len(),
        end: src.len(),
        line_start: true,
    });
    (out, errors)
}
