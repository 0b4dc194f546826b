//! Tokenizer for N3 text.

use crate::error::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// `<...>`, with escapes decoded but not yet resolved against the base.
    IriRef(String),
    /// `prefix:local`, `:local` or `prefix:`.
    PrefixedName {
        prefix: String,
        local: String,
    },
    /// An alphanumeric string with neither `:` nor `@`; a keyword or a name
    /// depending on the `@keywords` mode.
    BareWord(String),
    /// `?name`
    Variable(String),
    /// `_:label`
    BlankLabel(String),
    /// A quoted string; `long` for the triple-quoted form.
    String {
        value: String,
        long: bool,
    },
    Integer(String),
    Decimal(String),
    Double(String),
    /// `@word`: a directive, keyword or language tag.
    AtWord(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semicolon,
    Comma,
    Dot,
    DoubleCaret,
    Equals,
    Implies,
    ImpliedBy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut lexer = Lexer {
        text,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(tokens)
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.text[self.pos..].chars().nth(n)
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

    fn mark(&self) -> SourceSpan {
        SourceSpan {
            start: self.pos,
            end: self.pos,
            line: self.line,
            column: self.column,
        }
    }

    fn finish(&self, mut span: SourceSpan, kind: TokenKind) -> Token {
        span.end = self.pos;
        Token { kind, span }
    }

    fn error(&self, span: SourceSpan, message: impl Into<String>) -> ParseError {
        let mut span = span;
        span.end = self.pos;
        ParseError::new(ParseErrorKind::Lexical, span, message)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        let start = self.mark();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let simple = |kind: TokenKind, len: usize, lexer: &mut Self| {
            for _ in 0..len {
                lexer.bump();
            }
            Ok(Some(lexer.finish(start, kind)))
        };
        match c {
            '{' => simple(TokenKind::LBrace, 1, self),
            '}' => simple(TokenKind::RBrace, 1, self),
            '[' => simple(TokenKind::LBracket, 1, self),
            ']' => simple(TokenKind::RBracket, 1, self),
            '(' => simple(TokenKind::LParen, 1, self),
            ')' => simple(TokenKind::RParen, 1, self),
            ';' => simple(TokenKind::Semicolon, 1, self),
            ',' => simple(TokenKind::Comma, 1, self),
            '=' if self.peek_at(1) == Some('>') => simple(TokenKind::Implies, 2, self),
            '=' => simple(TokenKind::Equals, 1, self),
            '^' if self.peek_at(1) == Some('^') => simple(TokenKind::DoubleCaret, 2, self),
            '<' if self.peek_at(1) == Some('=') => simple(TokenKind::ImpliedBy, 2, self),
            '<' => self.iri_ref(start).map(Some),
            '"' => self.string(start).map(Some),
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if word.is_empty() {
                    return Err(self.error(start, "expected a keyword after '@'"));
                }
                Ok(Some(self.finish(start, TokenKind::AtWord(word))))
            }
            '?' => {
                self.bump();
                let name = self.name_part();
                if name.is_empty() {
                    return Err(self.error(start, "expected a variable name after '?'"));
                }
                Ok(Some(self.finish(start, TokenKind::Variable(name))))
            }
            '_' if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.name_part();
                if label.is_empty() {
                    return Err(self.error(start, "expected a blank node label after '_:'"));
                }
                Ok(Some(self.finish(start, TokenKind::BlankLabel(label))))
            }
            '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => {
                self.number(start).map(Some)
            }
            '.' => simple(TokenKind::Dot, 1, self),
            '+' | '-'
                if self
                    .peek_at(1)
                    .is_some_and(|d| d.is_ascii_digit() || d == '.') =>
            {
                self.number(start).map(Some)
            }
            c if c.is_ascii_digit() => self.number(start).map(Some),
            ':' => {
                self.bump();
                let local = self.name_part();
                Ok(Some(self.finish(
                    start,
                    TokenKind::PrefixedName {
                        prefix: String::new(),
                        local,
                    },
                )))
            }
            c if is_name_start(c) => {
                let word = self.take_while(is_name_char);
                if self.peek() == Some(':') {
                    self.bump();
                    let local = self.name_part();
                    Ok(Some(self.finish(
                        start,
                        TokenKind::PrefixedName {
                            prefix: word,
                            local,
                        },
                    )))
                } else {
                    Ok(Some(self.finish(start, TokenKind::BareWord(word))))
                }
            }
            other => {
                self.bump();
                Err(self.error(start, format!("unexpected character {other:?}")))
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    /// A local name: name characters, with interior dots allowed.
    fn name_part(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            let interior_dot =
                c == '.' && !out.is_empty() && self.peek_at(1).is_some_and(is_name_char);
            if is_name_char(c) || interior_dot {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        out
    }

    fn iri_ref(&mut self, start: SourceSpan) -> Result<Token, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated IRI")),
                Some('>') => break,
                Some(c) if c.is_whitespace() => {
                    return Err(self.error(start, "unterminated IRI (whitespace before '>')"));
                }
                Some('\\') => out.push(self.unicode_escape(start)?),
                Some(c) => out.push(c),
            }
        }
        Ok(self.finish(start, TokenKind::IriRef(out)))
    }

    fn unicode_escape(&mut self, start: SourceSpan) -> Result<char, ParseError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error(start, "invalid escape sequence")),
        };
        let mut hex = String::new();
        for _ in 0..width {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.error(start, "invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(start, "invalid unicode code point"))
    }

    fn string(&mut self, start: SourceSpan) -> Result<Token, ParseError> {
        let long = self.text[self.pos..].starts_with("\"\"\"");
        let quote_len = if long { 3 } else { 1 };
        for _ in 0..quote_len {
            self.bump();
        }
        let mut out = String::new();
        loop {
            if long && self.text[self.pos..].starts_with("\"\"\"") {
                // A closing run of more than three quotes ends with the last three.
                let run = self.text[self.pos..]
                    .chars()
                    .take_while(|&c| c == '"')
                    .count();
                for _ in 0..run - 3 {
                    out.push('"');
                    self.bump();
                }
                for _ in 0..3 {
                    self.bump();
                }
                break;
            }
            match self.bump() {
                None => return Err(self.error(start, "unterminated string")),
                Some('"') if !long => break,
                Some('\n') if !long => {
                    return Err(self.error(start, "unterminated string (newline)"))
                }
                Some('\\') => {
                    let escaped = match self.peek() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('\'') => '\'',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('u') | Some('U') => {
                            out.push(self.unicode_escape(start)?);
                            continue;
                        }
                        _ => return Err(self.error(start, "invalid escape sequence in string")),
                    };
                    self.bump();
                    out.push(escaped);
                }
                Some(c) => out.push(c),
            }
        }
        Ok(self.finish(start, TokenKind::String { value: out, long }))
    }

    fn number(&mut self, start: SourceSpan) -> Result<Token, ParseError> {
        let mut lexical = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            lexical.push(c);
            self.bump();
        }
        lexical.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            lexical.push('.');
            self.bump();
            lexical.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    lexical.push(self.bump().unwrap());
                }
                lexical.push_str(&self.take_while(|c| c.is_ascii_digit()));
                return Ok(self.finish(start, TokenKind::Double(lexical)));
            }
        }
        if !lexical.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.error(start, "malformed number"));
        }
        let kind = if decimal {
            TokenKind::Decimal(lexical)
        } else {
            TokenKind::Integer(lexical)
        };
        Ok(self.finish(start, kind))
    }
}
