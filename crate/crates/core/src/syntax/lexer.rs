//! Tokenizer for `.dooml` sources.

use crate::diagnostic::{codes, Diagnostic};
use crate::model::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Comma,
    Dot,
    Slash,
    Plus,
    Minus,
    Hash,
    /// `->` or `→`
    Arrow,
    /// `--`
    Link,
    /// `!` or `●`
    Filled,
    /// `?` or `○`
    Open,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(s) => format!("number `{s}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Hash => "`#`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Link => "`--`".into(),
            TokenKind::Filled => "`!`".into(),
            TokenKind::Open => "`?`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'s> {
    src: &'s str,
    file: usize,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'s> Cursor<'s> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span { file: self.file, line: self.line, column: self.column, offset: self.pos, len: 0 }
    }

    fn close(&self, start: Span) -> Span {
        Span { len: self.pos - start.offset, ..start }
    }
}

/// Splits `src` into tokens. Unknown characters are reported and skipped;
/// the returned stream always ends with [`TokenKind::Eof`].
pub fn tokenize(src: &str, file: usize) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { src, file, pos: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.mark();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let begin = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let text = src[begin..cur.pos].to_string();
            tokens.push(Token { kind: TokenKind::Ident(text), span: cur.close(start) });
            continue;
        }
        if c.is_ascii_digit() {
            let begin = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.bump();
            }
            let text = src[begin..cur.pos].to_string();
            tokens.push(Token { kind: TokenKind::Int(text), span: cur.close(start) });
            continue;
        }

        cur.bump();
        let kind = match c {
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            ':' => TokenKind::Colon,
            ';' => TokenKind::Semi,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '/' => TokenKind::Slash,
            '+' => TokenKind::Plus,
            '#' => TokenKind::Hash,
            '!' | '●' => TokenKind::Filled,
            '?' | '○' => TokenKind::Open,
            '→' => TokenKind::Arrow,
            '-' => match cur.peek() {
                Some('>') => {
                    cur.bump();
                    TokenKind::Arrow
                }
                Some('-') => {
                    cur.bump();
                    TokenKind::Link
                }
                _ => TokenKind::Minus,
            },
            other => {
                diagnostics.push(Diagnostic::error(
                    codes::SYNTAX,
                    format!("unexpected character `{}`", other.escape_default()),
                    cur.close(start),
                ));
                continue;
            }
        };
        tokens.push(Token { kind, span: cur.close(start) });
    }

    let end = cur.mark();
    tokens.push(Token { kind: TokenKind::Eof, span: end });
    (tokens, diagnostics)
}
