//! Backslash escapes in character, byte and string literals.

use super::LexErrorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeMode {
    Char,
    Byte,
    Str,
    ByteStr,
}

impl EscapeMode {
    fn is_byte(self) -> bool {
        matches!(self, EscapeMode::Byte | EscapeMode::ByteStr)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    Chars(String),
    Bytes(Vec<u8>),
}

/// Decodes the text between the quotes of a literal.
///
/// Accepted escapes: `\xNN`, `\\`, `\'`, `\"`, `\0`, `\t`, `\n`, `\r`, and in
/// char/string mode `\uNNNN` and `\UNNNNNNNN`. `\0` followed by a digit is an
/// octal escape and is rejected. Char and byte modes require exactly one
/// resulting unit.
pub fn decode_escapes(body: &str, mode: EscapeMode) -> Result<Decoded, LexErrorKind> {
    let mut units: Vec<u32> = Vec::new();
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '\\' {
            if mode.is_byte() && !c.is_ascii() {
                return Err(LexErrorKind::NonAsciiInByteLiteral);
            }
            units.push(c as u32);
            continue;
        }
        let Some(e) = chars.next() else {
            return Err(LexErrorKind::InvalidEscape("\\".into()));
        };
        let unit = match e {
            'x' => {
                let v = take_hex(&mut chars, 2).ok_or_else(|| LexErrorKind::InvalidEscape("\\x".into()))?;
                if !mode.is_byte() && v > 0x7f {
                    return Err(LexErrorKind::InvalidEscape(format!("\\x{:02x}", v)));
                }
                v
            }
            '\\' => 0x5c,
            '\'' => 0x27,
            '"' => 0x22,
            't' => 0x09,
            'n' => 0x0a,
            'r' => 0x0d,
            '0' => {
                if chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    return Err(LexErrorKind::InvalidEscape("octal escape".into()));
                }
                0
            }
            'u' | 'U' if !mode.is_byte() => {
                let width = if e == 'u' { 4 } else { 8 };
                let v = take_hex(&mut chars, width)
                    .ok_or_else(|| LexErrorKind::InvalidEscape(format!("\\{}", e)))?;
                if char::from_u32(v).is_none() {
                    return Err(LexErrorKind::InvalidEscape(format!("\\{}{:X}", e, v)));
                }
                v
            }
            other => return Err(LexErrorKind::InvalidEscape(format!("\\{}", other))),
        };
        units.push(unit);
    }

    match mode {
        EscapeMode::Char | EscapeMode::Byte if units.is_empty() => Err(LexErrorKind::EmptyCharLiteral),
        EscapeMode::Char | EscapeMode::Byte if units.len() > 1 => Err(LexErrorKind::OverlongCharLiteral),
        EscapeMode::Char | EscapeMode::Str => Ok(Decoded::Chars(
            units.into_iter().map(|u| char::from_u32(u).expect("validated scalar")).collect(),
        )),
        EscapeMode::Byte | EscapeMode::ByteStr => Ok(Decoded::Bytes(units.into_iter().map(|u| u as u8).collect())),
    }
}

fn take_hex(chars: &mut std::iter::Peekable<std::str::Chars<'_>>, n: usize) -> Option<u32> {
    let mut v: u32 = 0;
    for _ in 0..n {
        let d = chars.next()?.to_digit(16)?;
        v = v * 16 + d;
    }
    Some(v)
}

/// Inverse of [`decode_escapes`] for string mode: produces a literal body that
/// decodes back to `s`.
pub fn escape_str(s: &str, quote: char) -> String {
    let mut out = String::new();
    for c in s.chars() {
        push_escaped(&mut out, c, quote);
    }
    out
}

pub fn escape_char(c: char) -> String {
    let mut out = String::new();
    push_escaped(&mut out, c, '\'');
    out
}

pub fn escape_bytes(bytes: &[u8]) -> String {
    let mut out = String::new();
    for &b in bytes {
        match b {
            b'\\' => out.push_str("\\\\"),
            b'"' => out.push_str("\\\""),
            b'\n' => out.push_str("\\n"),
            b'\t' => out.push_str("\\t"),
            b'\r' => out.push_str("\\r"),
            0x20..=0x7e => out.push(b as char),
            _ => out.push_str(&format!("\\x{:02x}", b)),
        }
    }
    out
}

fn push_escaped(out: &mut String, c: char, quote: char) {
    match c {
        '\\' => out.push_str("\\\\"),
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        '\0' => out.push_str("\\0"),
        c if c == quote => {
            out.push('\\');
            out.push(c);
        }
        c if (c as u32) < 0x20 || c as u32 == 0x7f => out.push_str(&format!("\\x{:02x}", c as u32)),
        c => out.push(c),
    }
}
