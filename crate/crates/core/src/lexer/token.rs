use std::fmt;

use num_bigint::BigUint;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    IntLit,
    FloatLit,
    CharLit,
    ByteLit,
    StrLit,
    ByteStrLit,
    Ident,
    Keyword,
    Punct,
    Delimiter,
}

impl TokenKind {
    pub fn name(self) -> &'static str {
        match self {
            TokenKind::IntLit => "IntLit",
            TokenKind::FloatLit => "FloatLit",
            TokenKind::CharLit => "CharLit",
            TokenKind::ByteLit => "ByteLit",
            TokenKind::StrLit => "StrLit",
            TokenKind::ByteStrLit => "ByteStrLit",
            TokenKind::Ident => "Ident",
            TokenKind::Keyword => "Keyword",
            TokenKind::Punct => "Punct",
            TokenKind::Delimiter => "Delimiter",
        }
    }
}

/// Declared width of a numeric literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suffix {
    Untyped,
    /// `i`: machine-width signed integer.
    I,
    /// `u`: machine-width unsigned integer.
    U,
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    I64,
    U64,
    F32,
    F64,
}

impl Suffix {
    pub fn parse(s: &str) -> Option<Suffix> {
        Some(match s {
            "" => Suffix::Untyped,
            "i" => Suffix::I,
            "u" => Suffix::U,
            "i8" => Suffix::I8,
            "u8" => Suffix::U8,
            "i16" => Suffix::I16,
            "u16" => Suffix::U16,
            "i32" => Suffix::I32,
            "u32" => Suffix::U32,
            "i64" => Suffix::I64,
            "u64" => Suffix::U64,
            "f32" => Suffix::F32,
            "f64" => Suffix::F64,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suffix::Untyped => "",
            Suffix::I => "i",
            Suffix::U => "u",
            Suffix::I8 => "i8",
            Suffix::U8 => "u8",
            Suffix::I16 => "i16",
            Suffix::U16 => "u16",
            Suffix::I32 => "i32",
            Suffix::U32 => "u32",
            Suffix::I64 => "i64",
            Suffix::U64 => "u64",
            Suffix::F32 => "f32",
            Suffix::F64 => "f64",
        }
    }

    pub fn is_float(self) -> bool {
        matches!(self, Suffix::F32 | Suffix::F64)
    }
}

/// Decoded literal value carried by a token.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    None,
    Int { value: BigUint, suffix: Suffix },
    Float { value: f64, suffix: Suffix },
    Char(char),
    Byte(u8),
    Str(String),
    ByteStr(Vec<u8>),
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub payload: Payload,
    pub span: SourceSpan,
}

/// Tokens compare by kind, text and payload; spans are ignored.
impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.text == other.text && self.payload == other.payload
    }
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>, payload: Payload, span: SourceSpan) -> Self {
        Token {
            kind,
            text: text.into(),
            payload,
            span,
        }
    }

    /// Punctuation, delimiter or keyword with the given text.
    pub fn is(&self, text: &str) -> bool {
        matches!(
            self.kind,
            TokenKind::Punct | TokenKind::Delimiter | TokenKind::Keyword
        ) && self.text == text
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::IntLit
                | TokenKind::FloatLit
                | TokenKind::CharLit
                | TokenKind::ByteLit
                | TokenKind::StrLit
                | TokenKind::ByteStrLit
        )
    }
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::None => Ok(()),
            Payload::Int { value, suffix } => write!(f, "{}{}", value, suffix.as_str()),
            Payload::Float { value, suffix } => write!(f, "{:?}{}", value, suffix.as_str()),
            Payload::Char(c) => write!(f, "{:?}", c),
            Payload::Byte(b) => write!(f, "{}u8", b),
            Payload::Str(s) => write!(f, "{:?}", s),
            Payload::ByteStr(bytes) => {
                write!(f, "[")?;
                for (i, b) in bytes.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{}u8", b)?;
                    } else {
                        write!(f, ", {}", b)?;
                    }
                }
                write!(f, "]")
            }
        }
    }
}

/// One token per line: `LINE:COL KIND TEXT → PAYLOAD`. Tokens without a
/// decoded payload repeat their text after the arrow.
pub fn dump_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        let payload = match &t.payload {
            Payload::None => t.text.clone(),
            p => p.to_string(),
        };
        out.push_str(&format!(
            "{}:{} {} {} → {}\n",
            t.span.start_line,
            t.span.start_col,
            t.kind.name(),
            t.text.replace('\n', "\\n"),
            payload
        ));
    }
    out
}

/// One JSON object per line: `{kind, text, payload, line, col}`.
pub fn dump_tokens_json(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        let payload = match &t.payload {
            Payload::None => serde_json::Value::Null,
            p => serde_json::Value::String(p.to_string()),
        };
        let obj = serde_json::json!({
            "kind": t.kind.name(),
            "text": t.text,
            "payload": payload,
            "line": t.span.start_line,
            "col": t.span.start_col,
        });
        out.push_str(&obj.to_string());
        out.push('\n');
    }
    out
}
