//! `println!`/`print!` templates.

use super::error::RuntimeErrorKind as K;
use super::value::Value;

enum Piece<'a> {
    Text(&'a str),
    Hole,
}

fn parse(template: &str) -> Result<Vec<Piece<'_>>, K> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let bytes = template.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let pair = bytes.get(i + 1).copied();
        match (bytes[i], pair) {
            (b'{', Some(b'{')) | (b'}', Some(b'}')) => {
                pieces.push(Piece::Text(&template[start..i + 1]));
                i += 2;
                start = i;
            }
            (b'{', Some(b'}')) => {
                pieces.push(Piece::Text(&template[start..i]));
                pieces.push(Piece::Hole);
                i += 2;
                start = i;
            }
            (b'{', _) => return Err(K::BadFormat(format!("unsupported placeholder at byte {}", i))),
            (b'}', _) => return Err(K::BadFormat(format!("unmatched `}}` at byte {}", i))),
            _ => i += 1,
        }
    }
    pieces.push(Piece::Text(&template[start..]));
    Ok(pieces)
}

/// Substitutes each `{}` with the next argument's display form.
pub fn render(template: &str, args: &[Value]) -> Result<String, K> {
    let pieces = parse(template)?;
    let holes = pieces.iter().filter(|p| matches!(p, Piece::Hole)).count();
    if holes != args.len() {
        return Err(K::FormatArityMismatch {
            placeholders: holes,
            args: args.len(),
        });
    }
    let mut out = String::new();
    let mut next = args.iter();
    for p in pieces {
        match p {
            Piece::Text(t) => out.push_str(t),
            Piece::Hole => out.push_str(&next.next().expect("counted").to_string()),
        }
    }
    Ok(out)
}
