//! Numeric literal decoding.

use num_bigint::BigUint;

use super::token::Suffix;
use super::LexErrorKind;

#[derive(Debug, Clone, PartialEq)]
pub enum NumberValue {
    Int { magnitude: BigUint, suffix: Suffix },
    Float { value: f64, suffix: Suffix },
}

/// Length in bytes of the numeric literal at the start of `s` (which must
/// begin with an ASCII digit). Over-scans invalid digits and fractions so
/// that [`decode_number`] can report them.
pub(super) fn scan_number(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    let radix = if b.len() > 1 && b[0] == b'0' {
        match b[1] {
            b'x' => 16,
            b'o' => 8,
            b'b' => 2,
            _ => 10,
        }
    } else {
        10
    };
    if radix != 10 {
        i = 2;
    }
    let is_digit = |c: u8| {
        if radix == 16 {
            c.is_ascii_hexdigit() || c == b'_'
        } else {
            c.is_ascii_digit() || c == b'_'
        }
    };
    while i < b.len() && is_digit(b[i]) {
        i += 1;
    }
    if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
        i += 1;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
    }
    if radix != 16 && i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        while j < b.len() && b[j] == b'_' {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            i = j;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
                i += 1;
            }
        }
    }
    while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
        i += 1;
    }
    i
}

/// Decodes the text of a numeric literal.
///
/// Underscores are ignored in every digit group, `e`/`E` are equivalent,
/// and base prefixes are only allowed on integers. A float suffix makes the
/// literal a float even without a fraction.
pub fn decode_number(text: &str) -> Result<NumberValue, LexErrorKind> {
    let (radix, body) = match text.get(..2) {
        Some("0x") => (16, &text[2..]),
        Some("0o") => (8, &text[2..]),
        Some("0b") => (2, &text[2..]),
        _ => (10, text),
    };
    let b = body.as_bytes();
    let mut i = 0;
    let in_digits = |c: u8| {
        if radix == 16 {
            c.is_ascii_hexdigit() || c == b'_'
        } else {
            c.is_ascii_digit() || c == b'_'
        }
    };
    while i < b.len() && in_digits(b[i]) {
        i += 1;
    }
    let int_part = &body[..i];

    let mut frac_part = None;
    if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
        let start = i + 1;
        i += 1;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'_') {
            i += 1;
        }
        frac_part = Some(&body[start..i]);
    }

    let mut exp_part = None;
    if radix != 16 && i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        let sign_start = j;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let digits_start = j;
        while j < b.len() && (b[j].is_ascii_digit() || b[j] == b'_') {
            j += 1;
        }
        if body[digits_start..j].bytes().any(|c| c.is_ascii_digit()) {
            exp_part = Some(&body[sign_start..j]);
            i = j;
        }
    }

    let suffix_text = &body[i..];
    let suffix = Suffix::parse(suffix_text).ok_or_else(|| LexErrorKind::UnknownSuffix(suffix_text.to_string()))?;
    let is_float = frac_part.is_some() || exp_part.is_some() || suffix.is_float();

    let int_digits: String = int_part.chars().filter(|&c| c != '_').collect();
    if int_digits.is_empty() {
        return Err(LexErrorKind::MissingDigits);
    }

    if is_float {
        if radix != 10 {
            return Err(LexErrorKind::FloatWithBasePrefix);
        }
        if frac_part.is_some() || exp_part.is_some() {
            if matches!(suffix, Suffix::I | Suffix::U | Suffix::I8 | Suffix::U8 | Suffix::I16 | Suffix::U16 | Suffix::I32 | Suffix::U32 | Suffix::I64 | Suffix::U64) {
                return Err(LexErrorKind::UnknownSuffix(suffix_text.to_string()));
            }
        }
        let mut normalized = int_digits;
        if let Some(frac) = frac_part {
            normalized.push('.');
            normalized.extend(frac.chars().filter(|&c| c != '_'));
        }
        if let Some(exp) = exp_part {
            normalized.push('e');
            normalized.extend(exp.chars().filter(|&c| c != '_'));
        }
        let value: f64 = normalized
            .parse()
            .map_err(|_| LexErrorKind::MissingDigits)?;
        return Ok(NumberValue::Float { value, suffix });
    }

    if let Some(bad) = int_digits.chars().find(|c| c.to_digit(radix).is_none()) {
        return Err(LexErrorKind::InvalidDigitForBase { digit: bad, radix });
    }
    let magnitude = BigUint::parse_bytes(int_digits.as_bytes(), radix).ok_or(LexErrorKind::MissingDigits)?;
    Ok(NumberValue::Int { magnitude, suffix })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(text: &str) -> (u64, Suffix) {
        match decode_number(text).unwrap() {
            NumberValue::Int { magnitude, suffix } => (u64::try_from(magnitude).unwrap(), suffix),
            other => panic!("{text}: expected int, got {other:?}"),
        }
    }

    fn float(text: &str) -> (f64, Suffix) {
        match decode_number(text).unwrap() {
            NumberValue::Float { value, suffix } => (value, suffix),
            other => panic!("{text}: expected float, got {other:?}"),
        }
    }

    #[test]
    fn bases() {
        assert_eq!(int("0o1234"), (668, Suffix::Untyped));
        assert_eq!(int("0x1234"), (4660, Suffix::Untyped));
        assert_eq!(int("0b1010"), (10, Suffix::Untyped));
        assert_eq!(int("0"), (0, Suffix::Untyped));
        assert_eq!(int("123i64"), (123, Suffix::I64));
        assert_eq!(int("1234_i"), (1234, Suffix::I));
    }

    #[test]
    fn exponents() {
        assert_eq!(float("12E+34"), (1.2e35, Suffix::Untyped));
        assert_eq!(float("1_2e3_4"), (12e34, Suffix::Untyped));
        assert_eq!(float("12f32"), (12.0, Suffix::F32));
    }

    #[test]
    fn errors() {
        assert_eq!(
            decode_number("0b102"),
            Err(LexErrorKind::InvalidDigitForBase { digit: '2', radix: 2 })
        );
        assert_eq!(decode_number("0x1.5"), Err(LexErrorKind::FloatWithBasePrefix));
        assert_eq!(decode_number("0b1f32"), Err(LexErrorKind::FloatWithBasePrefix));
        assert_eq!(decode_number("12q"), Err(LexErrorKind::UnknownSuffix("q".into())));
        assert_eq!(decode_number("1.5i32"), Err(LexErrorKind::UnknownSuffix("i32".into())));
        assert_eq!(decode_number("0x"), Err(LexErrorKind::MissingDigits));
    }

    #[test]
    fn big_magnitudes_are_exact() {
        let text = "340282366920938463463374607431768211456000";
        match decode_number(text).unwrap() {
            NumberValue::Int { magnitude, .. } => assert_eq!(magnitude.to_string(), text),
            _ => panic!(),
        }
    }
}
