//! Source text to tokens.

mod escape;
mod number;
mod token;

pub use escape::{decode_escapes, escape_bytes, escape_char, escape_str, Decoded, EscapeMode};
pub use number::{decode_number, NumberValue};
pub use token::{dump_tokens, dump_tokens_json, Payload, Suffix, Token, TokenKind};

use thiserror::Error;

use crate::diag::{codes, Diagnostic};
use crate::span::SourceSpan;

pub const KEYWORDS: &[&str] = &[
    "fn", "let", "mut", "struct", "enum", "trait", "impl", "for", "in", "match", "if", "else", "loop", "while",
    "break", "return", "box", "ref", "self", "true", "false", "macro_rules",
];

/// Punctuation, longest first so that greedy matching works.
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "::", "->", "=>", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "^=",
    "&=", "|=", "<<", ">>", "..", "+", "-", "*", "/", "%", "^", "!", "&", "|", "=", "<", ">", "@", ".", ",", ";",
    ":", "#", "$", "?",
];

/// Raw strings may use at most this many `#` on each side.
pub const MAX_RAW_HASHES: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexErrorKind {
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unterminated raw string literal")]
    UnterminatedRawString,
    #[error("unterminated character literal")]
    UnterminatedChar,
    #[error("invalid escape `{0}`")]
    InvalidEscape(String),
    #[error("invalid digit `{digit}` for a base {radix} literal")]
    InvalidDigitForBase { digit: char, radix: u32 },
    #[error("float literals cannot have a base prefix")]
    FloatWithBasePrefix,
    #[error("empty character literal")]
    EmptyCharLiteral,
    #[error("character literal must contain exactly one character")]
    OverlongCharLiteral,
    #[error("unknown literal suffix `{0}`")]
    UnknownSuffix(String),
    #[error("numeric literal has no digits")]
    MissingDigits,
    #[error("non-ASCII character in byte literal")]
    NonAsciiInByteLiteral,
    #[error("raw string uses more than {MAX_RAW_HASHES} `#` delimiters")]
    RawHashLimit,
    #[error("block comments are not supported")]
    BlockComment,
    #[error("unknown token `{0}`")]
    UnknownToken(char),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct LexError {
    pub kind: LexErrorKind,
    pub span: SourceSpan,
}

impl LexError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(codes::LEX, self.span, self.kind.to_string())
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    tokenize_file(source, 0)
}

pub fn tokenize_file(source: &str, file_id: u32) -> Result<Vec<Token>, LexError> {
    Lexer::new(source, file_id).run()
}

struct Lexer<'s> {
    src: &'s str,
    file_id: u32,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'s> Lexer<'s> {
    fn new(src: &'s str, file_id: u32) -> Self {
        Lexer {
            src,
            file_id,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_bytes(&mut self, n: usize) {
        let target = self.pos + n;
        while self.pos < target {
            self.bump();
        }
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, (lo, line, col): (usize, u32, u32)) -> SourceSpan {
        SourceSpan {
            file_id: self.file_id,
            start_line: line,
            start_col: col,
            end_line: self.line,
            end_col: self.col,
            lo: lo as u32,
            hi: self.pos as u32,
        }
    }

    fn error(&self, kind: LexErrorKind, start: (usize, u32, u32)) -> LexError {
        LexError {
            kind,
            span: self.span_from(start),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let start = self.mark();
            if self.rest().starts_with("//") {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            if self.rest().starts_with("/*") {
                self.bump_bytes(2);
                return Err(self.error(LexErrorKind::BlockComment, start));
            }
            let token = if c.is_alphabetic() || c == '_' {
                self.lex_word(start)?
            } else if c.is_ascii_digit() {
                self.lex_number(start)?
            } else if c == '\'' {
                self.lex_char(start, false)?
            } else if c == '"' {
                self.lex_string(start, false)?
            } else if matches!(c, '(' | ')' | '[' | ']' | '{' | '}') {
                self.bump();
                Token::new(TokenKind::Delimiter, c.to_string(), Payload::None, self.span_from(start))
            } else if let Some(p) = PUNCTS.iter().find(|p| self.rest().starts_with(**p)) {
                self.bump_bytes(p.len());
                Token::new(TokenKind::Punct, *p, Payload::None, self.span_from(start))
            } else {
                self.bump();
                return Err(self.error(LexErrorKind::UnknownToken(c), start));
            };
            tokens.push(token);
        }
        Ok(tokens)
    }

    fn lex_word(&mut self, start: (usize, u32, u32)) -> Result<Token, LexError> {
        let rest = self.rest();
        // Literal prefixes: r"..", r#".."#, rb"..", br"..", b'.', b"..".
        for (prefix, byte) in [("rb", true), ("br", true), ("r", false)] {
            if let Some(after) = rest.strip_prefix(prefix) {
                let hashes = after.bytes().take_while(|&b| b == b'#').count();
                if after[hashes..].starts_with('"') {
                    self.bump_bytes(prefix.len());
                    return self.lex_raw_string(start, byte);
                }
            }
        }
        if rest.starts_with("b'") {
            self.bump();
            return self.lex_char(start, true);
        }
        if rest.starts_with("b\"") {
            self.bump();
            return self.lex_string(start, true);
        }
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        let text = &self.src[start.0..self.pos];
        let kind = if KEYWORDS.contains(&text) {
            TokenKind::Keyword
        } else {
            TokenKind::Ident
        };
        Ok(Token::new(kind, text, Payload::None, self.span_from(start)))
    }

    fn lex_number(&mut self, start: (usize, u32, u32)) -> Result<Token, LexError> {
        let len = number::scan_number(self.rest());
        self.bump_bytes(len);
        let text = &self.src[start.0..self.pos];
        let value = decode_number(text).map_err(|k| self.error(k, start))?;
        let (kind, payload) = match value {
            NumberValue::Int { magnitude, suffix } => (
                TokenKind::IntLit,
                Payload::Int {
                    value: magnitude,
                    suffix,
                },
            ),
            NumberValue::Float { value, suffix } => (TokenKind::FloatLit, Payload::Float { value, suffix }),
        };
        Ok(Token::new(kind, text, payload, self.span_from(start)))
    }

    /// Cursor is on the opening `'`.
    fn lex_char(&mut self, start: (usize, u32, u32), byte: bool) -> Result<Token, LexError> {
        self.bump();
        let body_start = self.pos;
        loop {
            match self.peek() {
                None | Some('\n') => return Err(self.error(LexErrorKind::UnterminatedChar, start)),
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some() {
                        self.bump();
                    }
                }
                Some('\'') => break,
                Some(_) => {
                    self.bump();
                }
            }
        }
        let body = &self.src[body_start..self.pos];
        self.bump();
        let mode = if byte { EscapeMode::Byte } else { EscapeMode::Char };
        let decoded = decode_escapes(body, mode).map_err(|k| self.error(k, start))?;
        let text = &self.src[start.0..self.pos];
        let span = self.span_from(start);
        Ok(match decoded {
            Decoded::Chars(s) => Token::new(
                TokenKind::CharLit,
                text,
                Payload::Char(s.chars().next().expect("one scalar")),
                span,
            ),
            Decoded::Bytes(b) => Token::new(TokenKind::ByteLit, text, Payload::Byte(b[0]), span),
        })
    }

    /// Cursor is on the opening `"`.
    fn lex_string(&mut self, start: (usize, u32, u32), byte: bool) -> Result<Token, LexError> {
        self.bump();
        let body_start = self.pos;
        loop {
            match self.peek() {
                None => return Err(self.error(LexErrorKind::UnterminatedString, start)),
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some() {
                        self.bump();
                    }
                }
                Some('"') => break,
                Some(_) => {
                    self.bump();
                }
            }
        }
        let body = &self.src[body_start..self.pos];
        self.bump();
        let mode = if byte { EscapeMode::ByteStr } else { EscapeMode::Str };
        let decoded = decode_escapes(body, mode).map_err(|k| self.error(k, start))?;
        let text = &self.src[start.0..self.pos];
        let span = self.span_from(start);
        Ok(match decoded {
            Decoded::Chars(s) => Token::new(TokenKind::StrLit, text, Payload::Str(s), span),
            Decoded::Bytes(b) => Token::new(TokenKind::ByteStrLit, text, Payload::ByteStr(b), span),
        })
    }

    /// Cursor is just past the `r`/`rb`/`br` prefix, on the first `#` or `"`.
    /// The body ends at the first `"` followed by the same number of `#`.
    fn lex_raw_string(&mut self, start: (usize, u32, u32), byte: bool) -> Result<Token, LexError> {
        let mut hashes = 0;
        while self.peek() == Some('#') {
            self.bump();
            hashes += 1;
        }
        if hashes > MAX_RAW_HASHES {
            return Err(self.error(LexErrorKind::RawHashLimit, start));
        }
        self.bump(); // opening quote
        let body_start = self.pos;
        let closing: String = std::iter::once('"').chain(std::iter::repeat_n('#', hashes)).collect();
        let Some(offset) = self.rest().find(&closing) else {
            self.bump_bytes(self.rest().len());
            return Err(self.error(LexErrorKind::UnterminatedRawString, start));
        };
        let body = &self.src[body_start..body_start + offset];
        self.bump_bytes(offset + closing.len());
        let text = &self.src[start.0..self.pos];
        let span = self.span_from(start);
        if byte {
            if !body.is_ascii() {
                return Err(self.error(LexErrorKind::NonAsciiInByteLiteral, start));
            }
            Ok(Token::new(TokenKind::ByteStrLit, text, Payload::ByteStr(body.as_bytes().to_vec()), span))
        } else {
            Ok(Token::new(TokenKind::StrLit, text, Payload::Str(body.to_string()), span))
        }
    }
}
